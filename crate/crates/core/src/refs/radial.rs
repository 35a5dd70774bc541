use crate::error::{Error, Result};
use crate::rootfind::MAX_EXPANSIONS;
use crate::scalar::{dot, Scalar};

/// Final bracket width of the golden-section search.
const DUAL_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution<T> {
    /// Inner minimizer at the optimal dual variable.
    pub x: Vec<T>,
    /// Optimal dual variable `t`.
    pub t: T,
    /// Dual objective `−g*(t) + ⟨c,x⟩ + t‖x‖²` at `t`.
    pub dual_value: T,
}

/// Solves `min_{x∈Q} ⟨c,x⟩ + g(‖x‖²)` through the concave dual
/// `max_t −g*(t) + min_{x∈Q} {⟨c,x⟩ + t‖x‖²}`.
///
/// `conjugate` is `g*` on the dual interval `(dual_lo, dual_hi)` (either end
/// may be infinite); `projector(c, t)` returns the inner minimizer. Finite
/// endpoints are also tried and kept if they evaluate and score higher.
/// The caller asserts that min and sup may be exchanged for the given `g` and `Q`.
pub fn radial_dual_subproblem<T, G, P>(
    c: &[T],
    conjugate: G,
    dual_lo: T,
    dual_hi: T,
    projector: P,
) -> Result<RadialSolution<T>>
where
    T: Scalar,
    G: Fn(T) -> Result<T>,
    P: Fn(&[T], T) -> Result<Vec<T>>,
{
    if !(dual_lo < dual_hi) || dual_lo.is_nan() || dual_hi.is_nan() {
        return Err(Error::InvalidParameter(format!("empty dual interval ({dual_lo}, {dual_hi})")));
    }
    let eval = |t: T| -> Result<(T, Vec<T>)> {
        let x = projector(c, t)?;
        let v = -conjugate(t)? + dot(c, &x) + t * dot(&x, &x);
        if v.is_nan() {
            return Err(Error::NonFinite(format!("dual objective at t = {t}")));
        }
        Ok((v, x))
    };
    let (mut a, mut b) = finite_bracket(&eval, dual_lo, dual_hi)?;

    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let width = T::lit(DUAL_WIDTH);
    let mut p = b - inv_phi * (b - a);
    let mut q = a + inv_phi * (b - a);
    let mut fp = eval(p)?;
    let mut fq = eval(q)?;
    while b - a > width {
        if fp.0 >= fq.0 {
            b = q;
            q = p;
            fq = fp;
            p = b - inv_phi * (b - a);
            fp = eval(p)?;
        } else {
            a = p;
            p = q;
            fp = fq;
            q = a + inv_phi * (b - a);
            fq = eval(q)?;
        }
        if p == q {
            break;
        }
    }
    let (mut t, (mut value, mut x)) = if fp.0 >= fq.0 { (p, fp) } else { (q, fq) };
    for end in [dual_lo, dual_hi] {
        if !end.is_finite() {
            continue;
        }
        if let Ok((v, xe)) = eval(end) {
            if v >= value {
                t = end;
                value = v;
                x = xe;
            }
        }
    }
    Ok(RadialSolution { x, t, dual_value: value })
}

/// Reduces a possibly infinite interval to a finite one containing a maximizer,
/// stepping outward with doubling steps while the dual keeps improving.
fn finite_bracket<T: Scalar>(eval: &impl Fn(T) -> Result<(T, Vec<T>)>, lo: T, hi: T) -> Result<(T, T)> {
    if lo.is_finite() && hi.is_finite() {
        return Ok((lo, hi));
    }
    let two = T::lit(2.0);
    let base = if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        T::zero()
    };
    let step0 = T::one().max(base.abs());
    // Direction of improvement: +1 towards +∞, −1 towards −∞.
    let dir = if !lo.is_finite() && !hi.is_finite() {
        let right = eval(base + step0)?.0;
        let left = eval(base - step0)?.0;
        let mid = eval(base)?.0;
        if right > mid {
            T::one()
        } else if left > mid {
            -T::one()
        } else {
            return Ok((base - step0, base + step0));
        }
    } else if lo.is_finite() {
        T::one()
    } else {
        -T::one()
    };
    let mut step = step0;
    let mut prev = base;
    let mut cur = base + dir * step;
    let mut f_cur = eval(cur)?.0;
    for _ in 0..MAX_EXPANSIONS {
        step = step * two;
        let next = cur + dir * step;
        let f_next = eval(next)?.0;
        if f_next <= f_cur {
            return Ok(if dir > T::zero() { (prev, next) } else { (next, prev) });
        }
        prev = cur;
        cur = next;
        f_cur = f_next;
    }
    Err(Error::UnboundedDual)
}
