//! Feasible sets `Q` and their membership tests.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Tolerance on `|Σx − 1|` for simplex membership.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Domain<T> {
    /// `Rⁿ`.
    AllSpace { dim: usize },
    /// `Δₙ = {x ≥ 0, Σx = 1}`.
    UnitSimplex { dim: usize },
    /// `(0, u]ⁿ`.
    OpenBox { dim: usize, upper: T },
    /// `Rⁿ₊₊`.
    PositiveOrthant { dim: usize },
    /// `{x : A x ∈ inner}`.
    Preimage { map: Arc<Matrix<T>>, inner: Box<Domain<T>> },
}

impl<T: Scalar> PartialEq for Domain<T> {
    fn eq(&self, other: &Self) -> bool {
        use Domain::*;
        match (self, other) {
            (AllSpace { dim: a }, AllSpace { dim: b }) => a == b,
            (UnitSimplex { dim: a }, UnitSimplex { dim: b }) => a == b,
            (PositiveOrthant { dim: a }, PositiveOrthant { dim: b }) => a == b,
            (OpenBox { dim: a, upper: u }, OpenBox { dim: b, upper: v }) => a == b && u == v,
            (Preimage { map: a, inner: i }, Preimage { map: b, inner: j }) => {
                (Arc::ptr_eq(a, b) || **a == **b) && i == j
            }
            _ => false,
        }
    }
}

impl<T: Scalar> Domain<T> {
    pub fn dim(&self) -> usize {
        match self {
            Domain::AllSpace { dim }
            | Domain::UnitSimplex { dim }
            | Domain::OpenBox { dim, .. }
            | Domain::PositiveOrthant { dim } => *dim,
            Domain::Preimage { map, .. } => map.cols(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::AllSpace { .. } => "all-space",
            Domain::UnitSimplex { .. } => "unit-simplex",
            Domain::OpenBox { .. } => "open-box",
            Domain::PositiveOrthant { .. } => "positive-orthant",
            Domain::Preimage { .. } => "preimage",
        }
    }

    /// Membership in `Q` (closed where `Q` is closed).
    pub fn contains(&self, x: &[T]) -> bool {
        if x.len() != self.dim() || !x.iter().all(|v| v.is_finite()) {
            return false;
        }
        match self {
            Domain::AllSpace { .. } => true,
            Domain::UnitSimplex { .. } => {
                x.iter().all(|&v| v >= T::zero()) && simplex_sum_ok(x)
            }
            Domain::OpenBox { upper, .. } => x.iter().all(|&v| v > T::zero() && v <= *upper),
            Domain::PositiveOrthant { .. } => x.iter().all(|&v| v > T::zero()),
            Domain::Preimage { map, inner } => inner.contains(&map.mul_vec(x)),
        }
    }

    /// Membership in `int Q` (relative interior for the simplex). Inequalities
    /// are strict with zero margin. For the box, the reference function stays
    /// differentiable at the upper face, so `x_i = u` counts as interior.
    pub fn contains_interior(&self, x: &[T]) -> bool {
        if x.len() != self.dim() || !x.iter().all(|v| v.is_finite()) {
            return false;
        }
        match self {
            Domain::UnitSimplex { .. } => x.iter().all(|&v| v > T::zero()) && simplex_sum_ok(x),
            Domain::Preimage { map, inner } => inner.contains_interior(&map.mul_vec(x)),
            _ => self.contains(x),
        }
    }

    /// Points where oracles on this domain can be evaluated: the open set on
    /// which the built-in functions are smooth. For the simplex this drops the
    /// sum constraint, so finite differences may leave the affine hull.
    pub fn is_evaluable(&self, x: &[T]) -> bool {
        if x.len() != self.dim() || !x.iter().all(|v| v.is_finite()) {
            return false;
        }
        match self {
            Domain::AllSpace { .. } => true,
            Domain::UnitSimplex { .. } | Domain::OpenBox { .. } | Domain::PositiveOrthant { .. } => {
                x.iter().all(|&v| v > T::zero())
            }
            Domain::Preimage { map, inner } => inner.is_evaluable(&map.mul_vec(x)),
        }
    }

    pub fn require_evaluable(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if self.is_evaluable(x) {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!(
                "point is not in the open region of the {} domain",
                self.name()
            )))
        }
    }

    pub fn require_interior(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if self.contains_interior(x) {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!(
                "point is not in the interior of the {} domain",
                self.name()
            )))
        }
    }
}

fn simplex_sum_ok<T: Scalar>(x: &[T]) -> bool {
    let s: T = x.iter().copied().sum();
    (s - T::one()).abs() <= T::lit(SIMPLEX_SUM_TOL)
}
