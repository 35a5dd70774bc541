use crate::error::{check_dim, Error, Result};
use crate::oracle::Objective;
use crate::scalar::{dot, Scalar};

/// Absolute slack below zero tolerated before a distance is declared negative.
const NEGATIVE_SLACK: f64 = 1e-12;

/// Bregman distance `D_h(y, x) = h(y) − h(x) − ⟨∇h(x), y − x⟩`.
///
/// `x` must be a point where `h` is differentiable. Tiny negative values from
/// rounding are returned as computed; a value below `−1e-12·(1 + |h(y)| + |h(x)|)`
/// means the reference is not convex and is reported as an error.
pub fn bregman_distance<T: Scalar, H: Objective<T> + ?Sized>(h: &H, y: &[T], x: &[T]) -> Result<T> {
    check_dim(h.dim(), y.len())?;
    check_dim(h.dim(), x.len())?;
    h.domain().require_evaluable(x)?;
    h.domain().require_evaluable(y)?;
    let (hx, gx) = h.value_grad(x)?;
    let hy = h.value(y)?;
    let lin: T = gx.iter().zip(y.iter().zip(x)).map(|(&g, (&a, &b))| g * (a - b)).sum();
    let d = hy - hx - lin;
    let slack = T::lit(NEGATIVE_SLACK) * (T::one() + hy.abs() + hx.abs());
    if d < -slack {
        return Err(Error::InvalidParameter(format!(
            "negative Bregman distance {d:e}; reference is not convex"
        )));
    }
    Ok(d)
}

/// `⟨∇h(x) − ∇h(y), x − y⟩`, the symmetrized Bregman quantity used by the
/// gradient-monotonicity certificates.
pub fn gradient_gap<T: Scalar, H: Objective<T> + ?Sized>(h: &H, x: &[T], y: &[T]) -> Result<T> {
    let gx = h.gradient(x)?;
    let gy = h.gradient(y)?;
    let dg: Vec<T> = gx.iter().zip(&gy).map(|(&a, &b)| a - b).collect();
    let dx: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    Ok(dot(&dg, &dx))
}
