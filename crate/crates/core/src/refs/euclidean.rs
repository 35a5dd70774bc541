use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::oracle::{Objective, Reference, Subsolution};
use crate::scalar::{dot, Scalar};

/// `h(x) = ½‖x‖²` on `Rⁿ`.
#[derive(Debug, Clone)]
pub struct SquaredEuclideanRef<T> {
    domain: Domain<T>,
}

impl<T: Scalar> SquaredEuclideanRef<T> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Self { domain: Domain::AllSpace { dim } })
    }
}

impl<T: Scalar> Objective<T> for SquaredEuclideanRef<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.domain.dim(), x.len())?;
        Ok(dot(x, x) / T::lit(2.0))
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.domain.dim(), x.len())?;
        Ok(x.to_vec())
    }

    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        Some(check_dim(self.domain.dim(), x.len()).map(|_| Matrix::identity(x.len())))
    }

    fn name(&self) -> String {
        "euclidean".to_string()
    }
}

impl<T: Scalar> Reference<T> for SquaredEuclideanRef<T> {
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>> {
        check_dim(self.domain.dim(), c.len())?;
        Ok(Subsolution::exact(c.iter().map(|&v| -v).collect()))
    }

    fn radial_center(&self) -> Option<Vec<T>> {
        Some(vec![T::zero(); self.domain.dim()])
    }
}
