//! Safeguarded Newton/bisection for strictly monotone scalar equations.
//!
//! Every subproblem family in [`crate::refs`] reduces to one such equation.
//! The solver first secures a sign change (expanding the bracket
//! geometrically if needed) and then takes Newton steps, falling back to
//! bisection whenever a step leaves the current bracket or fails to shrink
//! fast enough. No step is randomized, so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
pub const MAX_EXPANSIONS: usize = 128;
const EXPANSION_FACTOR: f64 = 2.0;

/// Search interval `[lo, hi]`; `hi` (or `lo`) may be infinite, in which case
/// the solver expands geometrically from the finite end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
}

impl<T: Scalar> Bracket<T> {
    /// An interval hint whose end values are not yet known.
    pub fn hint(lo: T, hi: T) -> Self {
        Self { lo, hi, f_lo: T::nan(), f_hi: T::nan() }
    }

    /// `[lo, +∞)`.
    pub fn half_open(lo: T) -> Self {
        Self::hint(lo, T::infinity())
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    fn has_sign_change(&self) -> bool {
        (self.f_lo <= T::zero() && self.f_hi >= T::zero()) || (self.f_lo >= T::zero() && self.f_hi <= T::zero())
    }
}

/// A converged root together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub root: T,
    /// `|func(root)|`.
    pub residual: T,
    pub iterations: usize,
    /// Final bracket; `root` lies inside it.
    pub bracket: Bracket<T>,
}

/// Solves `func(θ) = 0` for strictly monotone `func`, estimating the
/// derivative by central differences.
pub fn solve_monotone<T: Scalar>(mut func: impl FnMut(T) -> T, hint: Bracket<T>, tol: T) -> Result<Root<T>> {
    let step_rel = T::epsilon().cbrt();
    let mut wrapped = |t: T| {
        let v = func(t);
        (v, None)
    };
    solve_impl(&mut wrapped, hint, tol, Some(step_rel))
}

/// Solves `func(θ) = 0` where `func` returns `(value, derivative)`.
pub fn solve_monotone_with_derivative<T: Scalar>(
    mut func: impl FnMut(T) -> (T, T),
    hint: Bracket<T>,
    tol: T,
) -> Result<Root<T>> {
    let mut wrapped = |t: T| {
        let (v, d) = func(t);
        (v, Some(d))
    };
    solve_impl(&mut wrapped, hint, tol, None)
}

type Eval<'a, T> = dyn FnMut(T) -> (T, Option<T>) + 'a;

fn solve_impl<T: Scalar>(func: &mut Eval<'_, T>, hint: Bracket<T>, tol: T, fd_step: Option<T>) -> Result<Root<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if !(hint.lo < hint.hi) {
        return Err(Error::InvalidParameter(format!("empty bracket [{}, {}]", hint.lo, hint.hi)));
    }
    let mut br = establish_bracket(func, hint)?;
    for (t, ft) in [(br.lo, br.f_lo), (br.hi, br.f_hi)] {
        if ft.abs() <= tol {
            return Ok(Root { root: t, residual: ft.abs(), iterations: 0, bracket: br });
        }
    }

    let two = T::lit(2.0);
    let mut x = br.lo + (br.hi - br.lo) / two;
    let mut dx_old = br.hi - br.lo;
    let mut dx = dx_old;
    let mut best = (x, T::infinity());
    for it in 1..=MAX_ITERATIONS {
        let (fx, d) = func(x);
        if !fx.is_finite() {
            return Err(Error::NonFinite(format!("function value at {x}")));
        }
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        if fx.abs() <= tol {
            return Ok(Root { root: x, residual: fx.abs(), iterations: it, bracket: br });
        }
        if same_sign(fx, br.f_lo) {
            br.lo = x;
            br.f_lo = fx;
        } else {
            br.hi = x;
            br.f_hi = fx;
        }
        let d = match (d, fd_step) {
            (Some(d), _) => d,
            (None, Some(rel)) => central_difference(func, x, rel * (T::one() + x.abs()), &br),
            (None, None) => T::nan(),
        };
        let mid = br.lo + (br.hi - br.lo) / two;
        if mid <= br.lo || mid >= br.hi {
            // Bracket exhausted at floating-point resolution.
            return Err(Error::NonConvergence { iterations: it, residual: best.1.to_f64_lossy() });
        }
        let newton = x - fx / d;
        let newton_ok = d.is_finite()
            && d != T::zero()
            && newton > br.lo
            && newton < br.hi
            && (newton - x).abs() * two <= dx_old.abs();
        dx_old = dx;
        if newton_ok {
            dx = newton - x;
            x = newton;
        } else {
            dx = mid - x;
            x = mid;
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS, residual: best.1.to_f64_lossy() })
}

fn same_sign<T: Scalar>(a: T, b: T) -> bool {
    (a < T::zero()) == (b < T::zero())
}

fn central_difference<T: Scalar>(func: &mut Eval<'_, T>, x: T, h: T, br: &Bracket<T>) -> T {
    let a = (x - h).max(br.lo);
    let b = (x + h).min(br.hi);
    if !(b > a) {
        return T::nan();
    }
    (func(b).0 - func(a).0) / (b - a)
}

/// Evaluates the hint's endpoints and expands until the values differ in sign.
fn establish_bracket<T: Scalar>(func: &mut Eval<'_, T>, hint: Bracket<T>) -> Result<Bracket<T>> {
    let factor = T::lit(EXPANSION_FACTOR);
    let mut br = hint;
    match (br.lo.is_finite(), br.hi.is_finite()) {
        (true, true) => {
            br.f_lo = func(br.lo).0;
            br.f_hi = func(br.hi).0;
            let mut width = br.hi - br.lo;
            for _ in 0..MAX_EXPANSIONS {
                check_finite(&br)?;
                if br.has_sign_change() {
                    return Ok(br);
                }
                // Monotone: the root is beyond the end with smaller |f|.
                if br.f_lo.abs() < br.f_hi.abs() {
                    br.hi = br.lo;
                    br.f_hi = br.f_lo;
                    br.lo = br.lo - width;
                    br.f_lo = func(br.lo).0;
                } else {
                    br.lo = br.hi;
                    br.f_lo = br.f_hi;
                    br.hi = br.hi + width;
                    br.f_hi = func(br.hi).0;
                }
                width = width * factor;
            }
        }
        (true, false) => {
            br.f_lo = func(br.lo).0;
            let mut width = T::one().max(br.lo.abs());
            br.hi = br.lo + width;
            br.f_hi = func(br.hi).0;
            for _ in 0..MAX_EXPANSIONS {
                check_finite(&br)?;
                if br.has_sign_change() {
                    return Ok(br);
                }
                br.lo = br.hi;
                br.f_lo = br.f_hi;
                width = width * factor;
                br.hi = br.lo + width;
                br.f_hi = func(br.hi).0;
            }
        }
        (false, true) => {
            br.f_hi = func(br.hi).0;
            let mut width = T::one().max(br.hi.abs());
            br.lo = br.hi - width;
            br.f_lo = func(br.lo).0;
            for _ in 0..MAX_EXPANSIONS {
                check_finite(&br)?;
                if br.has_sign_change() {
                    return Ok(br);
                }
                br.hi = br.lo;
                br.f_hi = br.f_lo;
                width = width * factor;
                br.lo = br.hi - width;
                br.f_lo = func(br.lo).0;
            }
        }
        (false, false) => {
            return Err(Error::InvalidParameter("bracket needs at least one finite end".into()));
        }
    }
    if br.has_sign_change() && br.f_lo.is_finite() && br.f_hi.is_finite() {
        return Ok(br);
    }
    Err(Error::Bracketing { expansions: MAX_EXPANSIONS })
}

fn check_finite<T: Scalar>(br: &Bracket<T>) -> Result<()> {
    if br.f_lo.is_nan() || br.f_hi.is_nan() || !br.lo.is_finite() || !br.hi.is_finite() {
        return Err(Error::NonFinite(format!("bracket [{}, {}]", br.lo, br.hi)));
    }
    Ok(())
}
