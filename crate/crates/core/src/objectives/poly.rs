use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::oracle::Objective;
use crate::scalar::Scalar;

/// `p(α) = Σ a_i α^i`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialBound<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> PolynomialBound<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("polynomial needs at least one coefficient".into()));
        }
        if !coeffs.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, alpha: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &a| acc * alpha + a)
    }
}

/// `L = Σ|a_i|`, so that `p_r(α) ≤ L(1 + α^r)` for `α ≥ 0`.
pub fn l_from_polynomial_rn<T: Scalar>(poly: &PolynomialBound<T>) -> T {
    poly.coeffs.iter().map(|a| a.abs()).sum()
}

/// `L` with `q_s(α) ≤ L α^s` for all `α ≥ n/u`.
///
/// Returns `Σ|a_i| (u/n)^{i−s}` whenever `u ≤ n`. For `u > n` that sum is
/// not an upper bound (the low-order terms dominate near `α = n/u < 1`), and
/// `Σ|a_i| (n/u)^{i−s}` is returned instead; both are `Σ|a_i| ρ^{s−i}` with
/// `ρ = max(n/u, u/n)`.
pub fn l_from_polynomial_box<T: Scalar>(poly: &PolynomialBound<T>, u: T, n: usize) -> Result<T> {
    if !(u > T::zero()) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!("u must be positive and finite, got {u}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let nt = T::from_count(n);
    let rho = (nt / u).max(u / nt);
    let s = poly.degree();
    Ok(poly
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a.abs() * rho.powi((s - i) as i32))
        .sum())
}

/// One-dimensional polynomial objective `f(x) = Σ a_i x^i` on `R`.
#[derive(Debug, Clone)]
pub struct UnivariatePolynomial<T> {
    coeffs: Vec<T>,
    domain: Domain<T>,
}

impl<T: Scalar> UnivariatePolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        PolynomialBound::new(coeffs.clone())?;
        Ok(Self { coeffs, domain: Domain::AllSpace { dim: 1 } })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// k-th derivative at `x`.
    pub fn derivative(&self, x: T, k: usize) -> T {
        let mut acc = T::zero();
        for (i, &a) in self.coeffs.iter().enumerate().skip(k).rev() {
            let falling: usize = (i - k + 1..=i).product();
            acc = acc * x + a * T::from_count(falling);
        }
        acc
    }

    fn scalar(&self, x: &[T]) -> Result<T> {
        check_dim(1, x.len())?;
        if !x[0].is_finite() {
            return Err(Error::NonFinite("polynomial argument".into()));
        }
        Ok(x[0])
    }
}

impl<T: Scalar> Objective<T> for UnivariatePolynomial<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        Ok(self.derivative(self.scalar(x)?, 0))
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(vec![self.derivative(self.scalar(x)?, 1)])
    }

    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        Some(self.scalar(x).map(|t| Matrix::from_diag(&[self.derivative(t, 2)])))
    }

    fn name(&self) -> String {
        format!("poly(deg={})", self.coeffs.len().saturating_sub(1))
    }
}
