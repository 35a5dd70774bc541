use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oracle::{Objective, Reference, Subsolution};
use crate::rootfind::{solve_monotone_with_derivative, Bracket, DEFAULT_TOL};
use crate::scalar::Scalar;

/// `h(x) = −Σ ln x_j` on the unit simplex.
#[derive(Debug, Clone)]
pub struct LogBarrierSimplexRef<T> {
    domain: Domain<T>,
}

impl<T: Scalar> LogBarrierSimplexRef<T> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("log-barrier simplex needs n >= 2, got {dim}")));
        }
        Ok(Self { domain: Domain::UnitSimplex { dim } })
    }
}

/// Solves `argmin_{x∈Δₙ} ⟨c,x⟩ − Σ ln x_j`: `x_j = 1/(c_j + θ)` with θ the
/// root of `Σ 1/(c_j + θ) = 1` on `(−min c, ∞)`.
///
/// The solution depends on `c` only up to a common shift, so the equation is
/// solved for `c − min c`, whose root lies in `[1, n]`. The returned
/// multiplier is θ for the original `c`.
pub fn simplex_logbarrier_subproblem<T: Scalar>(c: &[T]) -> Result<Subsolution<T>> {
    let n = c.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("simplex subproblem needs n >= 2, got {n}")));
    }
    if !c.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("subproblem coefficient vector".into()));
    }
    let c_min = c.iter().copied().fold(T::infinity(), T::min);
    let shifted: Vec<T> = c.iter().map(|&v| v - c_min).collect();
    let d = |theta: T| {
        let mut value = -T::one();
        let mut slope = T::zero();
        for &ci in &shifted {
            let xi = T::one() / (ci + theta);
            value = value + xi;
            slope = slope - xi * xi;
        }
        (value, slope)
    };
    let hint = Bracket::hint(T::one(), T::from_count(n));
    let tol = T::lit(DEFAULT_TOL).max(T::epsilon() * T::from_count(4 * n));
    let root = solve_monotone_with_derivative(d, hint, tol)?;
    let theta = root.root;
    let x = shifted.iter().map(|&ci| T::one() / (ci + theta)).collect();
    Ok(Subsolution { x, multiplier: Some(theta - c_min), residual: root.residual })
}

impl<T: Scalar> Objective<T> for LogBarrierSimplexRef<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        self.domain.require_evaluable(x)?;
        Ok(-x.iter().map(|v| v.ln()).sum::<T>())
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.domain.require_evaluable(x)?;
        Ok(x.iter().map(|&v| -v.recip()).collect())
    }

    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        if let Err(e) = self.domain.require_evaluable(x) {
            return Some(Err(e));
        }
        let d: Vec<T> = x.iter().map(|&v| (v * v).recip()).collect();
        Some(Ok(Matrix::from_diag(&d)))
    }

    fn name(&self) -> String {
        "log-barrier".to_string()
    }
}

impl<T: Scalar> Reference<T> for LogBarrierSimplexRef<T> {
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>> {
        crate::error::check_dim(self.domain.dim(), c.len())?;
        simplex_logbarrier_subproblem(c)
    }

    fn center(&self) -> Result<Vec<T>> {
        let n = self.domain.dim();
        Ok(vec![T::one() / T::from_count(n); n])
    }
}
