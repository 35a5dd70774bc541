//! Oracle contracts: objectives, reference functions and the
//! (objective, reference, L, μ) bundle consumed by every solver.

use std::fmt;
use std::sync::Arc;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A differentiable convex function on the interior of a domain.
pub trait Objective<T: Scalar>: Send + Sync {
    fn domain(&self) -> &Domain<T>;

    fn dim(&self) -> usize {
        self.domain().dim()
    }

    fn value(&self, x: &[T]) -> Result<T>;

    fn gradient(&self, x: &[T]) -> Result<Vec<T>>;

    /// Value and gradient together; implementations sharing a factorization
    /// between the two override this.
    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        Ok((self.value(x)?, self.gradient(x)?))
    }

    /// Analytic Hessian, when the oracle has one.
    fn hessian(&self, _x: &[T]) -> Option<Result<Matrix<T>>> {
        None
    }

    fn name(&self) -> String {
        "objective".to_string()
    }
}

/// Output of a linearized subproblem `argmin_{x∈Q} ⟨c,x⟩ + h(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsolution<T> {
    pub x: Vec<T>,
    /// Scalar multiplier or step (θ) determined by the root equation, if any.
    pub multiplier: Option<T>,
    /// Residual of the scalar root equation (or stationarity residual when the
    /// solution is closed form).
    pub residual: T,
}

impl<T: Scalar> Subsolution<T> {
    pub fn exact(x: Vec<T>) -> Self {
        Self { x, multiplier: None, residual: T::zero() }
    }
}

/// A reference function `h` with an efficiently solvable linearized subproblem.
pub trait Reference<T: Scalar>: Objective<T> {
    /// Solves `argmin_{x∈Q} ⟨c,x⟩ + h(x)`.
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>>;

    /// The h-center `argmin_{x∈Q} h(x)`.
    fn center(&self) -> Result<Vec<T>> {
        Ok(self.subproblem(&vec![T::zero(); self.dim()])?.x)
    }

    /// `Some(x^c)` when `h` depends on `x` only through `‖x − x^c‖₂`,
    /// increasingly. Composite pieces use this to fold separable terms into
    /// the subproblem.
    fn radial_center(&self) -> Option<Vec<T>> {
        None
    }
}

/// A reference shifted by an additive constant, `h̃ = h − h(x⁰)`. Gradients,
/// Hessians, Bregman distances and subproblem solutions are unchanged.
#[derive(Clone)]
pub struct Normalized<T: Scalar> {
    inner: Arc<dyn Reference<T>>,
    offset: T,
}

impl<T: Scalar> Normalized<T> {
    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn inner(&self) -> &Arc<dyn Reference<T>> {
        &self.inner
    }
}

/// Wraps `reference` so that its value vanishes at `x0`.
pub fn normalize_at<T: Scalar>(reference: Arc<dyn Reference<T>>, x0: &[T]) -> Result<Normalized<T>> {
    let offset = reference.value(x0)?;
    if !offset.is_finite() {
        return Err(Error::NonFinite("reference value at the normalization point".into()));
    }
    Ok(Normalized { inner: reference, offset })
}

impl<T: Scalar> Objective<T> for Normalized<T> {
    fn domain(&self) -> &Domain<T> {
        self.inner.domain()
    }
    fn value(&self, x: &[T]) -> Result<T> {
        Ok(self.inner.value(x)? - self.offset)
    }
    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.inner.gradient(x)
    }
    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        let (v, g) = self.inner.value_grad(x)?;
        Ok((v - self.offset, g))
    }
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        self.inner.hessian(x)
    }
    fn name(&self) -> String {
        format!("normalized({})", self.inner.name())
    }
}

impl<T: Scalar> Reference<T> for Normalized<T> {
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>> {
        self.inner.subproblem(c)
    }
    fn center(&self) -> Result<Vec<T>> {
        self.inner.center()
    }
    fn radial_center(&self) -> Option<Vec<T>> {
        self.inner.radial_center()
    }
}

/// An objective together with a reference it is `L`-smooth and
/// `μ`-strongly convex relative to.
#[derive(Clone)]
pub struct RelSmoothPair<T: Scalar> {
    pub objective: Arc<dyn Objective<T>>,
    pub reference: Arc<dyn Reference<T>>,
    pub l: T,
    pub mu: T,
}

impl<T: Scalar> fmt::Debug for RelSmoothPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelSmoothPair")
            .field("objective", &self.objective.name())
            .field("reference", &self.reference.name())
            .field("l", &self.l)
            .field("mu", &self.mu)
            .finish()
    }
}

impl<T: Scalar> RelSmoothPair<T> {
    pub fn new(
        objective: Arc<dyn Objective<T>>,
        reference: Arc<dyn Reference<T>>,
        l: T,
        mu: T,
    ) -> Result<Self> {
        if !(l > T::zero()) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!("L must be positive and finite, got {l}")));
        }
        if !(mu >= T::zero()) || mu > l {
            return Err(Error::InvalidParameter(format!("need 0 <= mu <= L, got mu = {mu}, L = {l}")));
        }
        if objective.domain() != reference.domain() {
            return Err(Error::InvalidParameter(format!(
                "objective domain {} differs from reference domain {}",
                objective.domain().name(),
                reference.domain().name()
            )));
        }
        Ok(Self { objective, reference, l, mu })
    }

    pub fn domain(&self) -> &Domain<T> {
        self.objective.domain()
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Same pair with different constants (used for falsification runs).
    pub fn with_constants(&self, l: T, mu: T) -> Result<Self> {
        Self::new(self.objective.clone(), self.reference.clone(), l, mu)
    }
}
