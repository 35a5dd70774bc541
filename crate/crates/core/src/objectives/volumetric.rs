use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::oracle::Objective;
use crate::scalar::{dot, Scalar};

use super::dopt::numerical_rank;

/// `f_p(x) = ln det(H X^{−p} Hᵀ)` over the unit simplex.
#[derive(Debug, Clone)]
pub struct VolumetricObjective<T> {
    h: Matrix<T>,
    p: u32,
    domain: Domain<T>,
}

impl<T: Scalar> VolumetricObjective<T> {
    /// `p ≥ 1`; zero and negative exponents are rejected.
    pub fn new(h: Matrix<T>, p: i64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParameter(format!("volumetric exponent p must be >= 1, got {p}")));
        }
        let p = u32::try_from(p).map_err(|_| Error::InvalidParameter(format!("exponent {p} too large")))?;
        let (m, n) = (h.rows(), h.cols());
        if m == 0 || n < m + 1 {
            return Err(Error::InvalidParameter(format!("volumetric objective needs n >= m + 1, got m = {m}, n = {n}")));
        }
        let rank = numerical_rank(&h);
        if rank < m {
            return Err(Error::RankDeficient { rank, expected: m });
        }
        Ok(Self { h, p, domain: Domain::UnitSimplex { dim: n } })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.h.rows()
    }

    /// Relative smoothness constant `p(p+1)` with respect to the log-barrier.
    pub fn relative_l(&self) -> T {
        T::from_count(self.p as usize * (self.p as usize + 1))
    }
}

/// Value and gradient; `∂f/∂x_j = −p x_j^{−p−1} h_jᵀ (H X^{−p} Hᵀ)⁻¹ h_j`.
pub fn volumetric_value_grad<T: Scalar>(h: &Matrix<T>, p: u32, x: &[T]) -> Result<(T, Vec<T>)> {
    check_dim(h.cols(), x.len())?;
    if p < 1 {
        return Err(Error::InvalidParameter("volumetric exponent p must be >= 1".into()));
    }
    if !x.iter().all(|&v| v > T::zero() && v.is_finite()) {
        return Err(Error::DomainViolation("volumetric objective needs strictly positive x".into()));
    }
    let pe = p as i32;
    let w: Vec<T> = x.iter().map(|&v| v.powi(-pe)).collect();
    let chol = Cholesky::new(&h.weighted_gram(&w))?;
    let pt = T::from_count(p as usize);
    let grad = (0..h.cols())
        .map(|j| -pt * w[j] / x[j] * chol.inv_quad(&h.column(j)))
        .collect();
    Ok((chol.log_det(), grad))
}

impl<T: Scalar> Objective<T> for VolumetricObjective<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        Ok(self.value_grad(x)?.0)
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.value_grad(x)?.1)
    }

    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        self.domain.require_evaluable(x)?;
        volumetric_value_grad(&self.h, self.p, x)
    }

    /// `p(p+1) x_i^{−p−2} κ_i δ_ij − p² x_i^{−p−1} x_j^{−p−1} C_ij²` with
    /// `C = Hᵀ M⁻¹ H`, `κ_i = C_ii`.
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        let run = || -> Result<Matrix<T>> {
            self.domain.require_evaluable(x)?;
            let pe = self.p as i32;
            let n = x.len();
            let w: Vec<T> = x.iter().map(|&v| v.powi(-pe)).collect();
            let chol = Cholesky::new(&self.h.weighted_gram(&w))?;
            let cols: Vec<Vec<T>> = (0..n).map(|j| chol.solve_lower(&self.h.column(j))).collect();
            let pt = T::from_count(self.p as usize);
            let d: Vec<T> = (0..n).map(|j| w[j] / x[j]).collect();
            Ok(Matrix::from_fn(n, n, |i, j| {
                let c = dot(&cols[i], &cols[j]);
                let mut v = -pt * pt * d[i] * d[j] * c * c;
                if i == j {
                    v = v + pt * (pt + T::one()) * d[i] / x[i] * c;
                }
                v
            }))
        };
        Some(run())
    }

    fn name(&self) -> String {
        format!("volumetric(p={})", self.p)
    }
}
