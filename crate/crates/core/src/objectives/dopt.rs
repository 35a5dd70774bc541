use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{singular_values, Cholesky, Matrix};
use crate::oracle::Objective;
use crate::scalar::{dot, Scalar};

/// Relative threshold on singular values used by the rank check.
const RANK_TOL: f64 = 1e-10;

/// `f(x) = −ln det(H X Hᵀ)` over the unit simplex, `X = Diag(x)`.
#[derive(Debug, Clone)]
pub struct DOptimalDesign<T> {
    h: Matrix<T>,
    domain: Domain<T>,
}

impl<T: Scalar> DOptimalDesign<T> {
    /// `h` is `m × n` with rank `m` and `n ≥ m + 1`.
    pub fn new(h: Matrix<T>) -> Result<Self> {
        let (m, n) = (h.rows(), h.cols());
        if m == 0 || n < m + 1 {
            return Err(Error::InvalidParameter(format!("D-optimal design needs n >= m + 1, got m = {m}, n = {n}")));
        }
        if !h.as_slice().iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("design matrix".into()));
        }
        let rank = numerical_rank(&h);
        if rank < m {
            return Err(Error::RankDeficient { rank, expected: m });
        }
        Ok(Self { h, domain: Domain::UnitSimplex { dim: n } })
    }

    pub fn design(&self) -> &Matrix<T> {
        &self.h
    }

    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Leverages `κ_j = h_jᵀ (H X Hᵀ)⁻¹ h_j` together with `f(x)`.
    pub fn value_and_kappa(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        check_dim(self.n(), x.len())?;
        let chol = Cholesky::new(&self.h.weighted_gram(x))?;
        let kappa = (0..self.n()).map(|j| chol.inv_quad(&self.h.column(j))).collect();
        Ok((-chol.log_det(), kappa))
    }
}

pub(crate) fn numerical_rank<T: Scalar>(a: &Matrix<T>) -> usize {
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or_else(T::zero);
    if top == T::zero() {
        return 0;
    }
    let cut = T::lit(RANK_TOL) * top;
    sv.iter().filter(|&&s| s > cut).count()
}

/// Value and gradient of `−ln det(H Diag(x) Hᵀ)`; `∂f/∂x_j = −h_jᵀ M⁻¹ h_j`.
pub fn dopt_value_grad<T: Scalar>(h: &Matrix<T>, x: &[T]) -> Result<(T, Vec<T>)> {
    check_dim(h.cols(), x.len())?;
    if !x.iter().all(|&v| v > T::zero() && v.is_finite()) {
        return Err(Error::DomainViolation("D-optimal design needs strictly positive weights".into()));
    }
    let chol = Cholesky::new(&h.weighted_gram(x))?;
    let grad = (0..h.cols()).map(|j| -chol.inv_quad(&h.column(j))).collect();
    Ok((-chol.log_det(), grad))
}

impl<T: Scalar> Objective<T> for DOptimalDesign<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        self.domain.require_evaluable(x)?;
        Ok(-Cholesky::new(&self.h.weighted_gram(x))?.log_det())
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.value_grad(x)?.1)
    }

    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        self.domain.require_evaluable(x)?;
        dopt_value_grad(&self.h, x)
    }

    /// `(Hᵀ M⁻¹ H)∘(Hᵀ M⁻¹ H)`.
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        let run = || -> Result<Matrix<T>> {
            self.domain.require_evaluable(x)?;
            let chol = Cholesky::new(&self.h.weighted_gram(x))?;
            let w: Vec<Vec<T>> = (0..self.n()).map(|j| chol.solve_lower(&self.h.column(j))).collect();
            Ok(Matrix::from_fn(self.n(), self.n(), |i, j| {
                let c = dot(&w[i], &w[j]);
                c * c
            }))
        };
        Some(run())
    }

    fn name(&self) -> String {
        format!("dopt(m={}, n={})", self.m(), self.n())
    }
}
