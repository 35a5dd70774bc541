use std::sync::Arc;

use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::oracle::Objective;
use crate::scalar::{dot, Scalar};

/// `f(x) = ½ xᵀQx + qᵀx` on `Rⁿ` with `Q` symmetric.
#[derive(Debug, Clone)]
pub struct Quadratic<T> {
    q: Matrix<T>,
    lin: Vec<T>,
    domain: Domain<T>,
}

impl<T: Scalar> Quadratic<T> {
    pub fn new(q: Matrix<T>, lin: Vec<T>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch { expected: q.rows(), got: q.cols() });
        }
        check_dim(q.rows(), lin.len())?;
        let mut q = q;
        q.symmetrize();
        Ok(Self { domain: Domain::AllSpace { dim: lin.len() }, q, lin })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.q
    }
}

impl<T: Scalar> Objective<T> for Quadratic<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.lin.len(), x.len())?;
        Ok(dot(x, &self.q.mul_vec(x)) / T::lit(2.0) + dot(&self.lin, x))
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.lin.len(), x.len())?;
        Ok(self.q.mul_vec(x).iter().zip(&self.lin).map(|(&a, &b)| a + b).collect())
    }

    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        Some(check_dim(self.lin.len(), x.len()).map(|_| self.q.clone()))
    }

    fn name(&self) -> String {
        "quadratic".to_string()
    }
}

/// `x ↦ f(x) + ⟨q, x⟩`.
pub struct LinearTilt<T: Scalar> {
    inner: Arc<dyn Objective<T>>,
    q: Vec<T>,
}

impl<T: Scalar> LinearTilt<T> {
    pub fn new(inner: Arc<dyn Objective<T>>, q: Vec<T>) -> Result<Self> {
        check_dim(inner.dim(), q.len())?;
        Ok(Self { inner, q })
    }
}

impl<T: Scalar> Objective<T> for LinearTilt<T> {
    fn domain(&self) -> &Domain<T> {
        self.inner.domain()
    }

    fn value(&self, x: &[T]) -> Result<T> {
        Ok(self.inner.value(x)? + dot(&self.q, x))
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.value_grad(x)?.1)
    }

    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        let (v, g) = self.inner.value_grad(x)?;
        Ok((v + dot(&self.q, x), g.iter().zip(&self.q).map(|(&a, &b)| a + b).collect()))
    }

    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        self.inner.hessian(x)
    }

    fn name(&self) -> String {
        format!("{} + <q,x>", self.inner.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::fd_gradient_error;

    #[test]
    fn quadratic_gradient() {
        let q = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let f = Quadratic::new(q, vec![1.0, -1.0]).unwrap();
        assert_eq!(f.gradient(&[1.0, 1.0]).unwrap(), vec![4.0, 3.0]);
        assert!(fd_gradient_error(&f, &[0.3, -2.0]) < 1e-8);
    }

    #[test]
    fn tilt_adds_linear_term() {
        let f: Arc<dyn Objective<f64>> = Arc::new(Quadratic::new(Matrix::identity(2), vec![0.0; 2]).unwrap());
        let t = LinearTilt::new(f, vec![1.0, 2.0]).unwrap();
        let (v, g) = t.value_grad(&[1.0, 1.0]).unwrap();
        assert_eq!(v, 4.0);
        assert_eq!(g, vec![2.0, 3.0]);
    }
}
