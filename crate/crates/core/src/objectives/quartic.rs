use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::oracle::Objective;
use crate::scalar::{dot, norm2, Scalar};

use super::poly::{l_from_polynomial_rn, PolynomialBound};

/// Relative threshold below which a singular value counts as zero.
const RANK_TOL: f64 = 1e-10;

/// `f(x) = ¼‖Ax − b‖₄⁴ + ½‖Cx − d‖₂² (+ ¼‖Ex‖₂⁴)`.
#[derive(Debug, Clone)]
pub struct PolyQuartic<T> {
    a: Matrix<T>,
    b: Vec<T>,
    c: Matrix<T>,
    d: Vec<T>,
    e: Option<Matrix<T>>,
    domain: Domain<T>,
}

impl<T: Scalar> PolyQuartic<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>, c: Matrix<T>, d: Vec<T>, e: Option<Matrix<T>>) -> Result<Self> {
        let n = a.cols();
        if n == 0 {
            return Err(Error::InvalidParameter("quartic needs at least one variable".into()));
        }
        check_dim(a.rows(), b.len())?;
        check_dim(n, c.cols())?;
        check_dim(c.rows(), d.len())?;
        if let Some(e) = &e {
            check_dim(n, e.cols())?;
        }
        Ok(Self { a, b, c, d, e, domain: Domain::AllSpace { dim: n } })
    }

    /// Coefficients of `p₂(α) ≥ ‖∇²f(x)‖` at `‖x‖ = α`:
    /// `a₀ = 3‖A‖²‖b‖² + ‖C‖²`, `a₁ = 6‖A‖³‖b‖`, `a₂ = 3‖A‖⁴ (+ 3‖E‖⁴)`.
    pub fn polynomial_bound(&self) -> PolynomialBound<T> {
        let three = T::lit(3.0);
        let na = operator_norm(&self.a);
        let nb = norm2(&self.b);
        let nc = operator_norm(&self.c);
        let mut a2 = three * na.powi(4);
        if let Some(e) = &self.e {
            a2 = a2 + three * operator_norm(e).powi(4);
        }
        let coeffs = vec![three * na * na * nb * nb + nc * nc, T::lit(6.0) * na.powi(3) * nb, a2];
        PolynomialBound::new(coeffs).expect("finite coefficients")
    }

    /// Smoothness constant relative to the power-norm reference with `r = 2`.
    pub fn relative_l(&self) -> T {
        l_from_polynomial_rn(&self.polynomial_bound())
    }

    /// Strong-convexity constant relative to the same reference; zero without `E`.
    pub fn relative_mu(&self) -> T {
        match &self.e {
            Some(e) => mu_for_quartic_strong(e, &self.c),
            None => T::zero(),
        }
    }
}

/// Value and gradient `Aᵀ(Ax−b)^{∘3} + Cᵀ(Cx−d) (+ ‖Ex‖² EᵀEx)`.
pub fn quartic_value_grad<T: Scalar>(
    a: &Matrix<T>,
    b: &[T],
    c: &Matrix<T>,
    d: &[T],
    e: Option<&Matrix<T>>,
    x: &[T],
) -> Result<(T, Vec<T>)> {
    check_dim(a.cols(), x.len())?;
    check_dim(c.cols(), x.len())?;
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let ra: Vec<T> = a.mul_vec(x).iter().zip(b).map(|(&v, &w)| v - w).collect();
    let rc: Vec<T> = c.mul_vec(x).iter().zip(d).map(|(&v, &w)| v - w).collect();
    let mut value = quarter * ra.iter().map(|v| v.powi(4)).sum::<T>() + half * dot(&rc, &rc);
    let cubes: Vec<T> = ra.iter().map(|v| v.powi(3)).collect();
    let mut grad: Vec<T> = a.tr_mul_vec(&cubes).iter().zip(c.tr_mul_vec(&rc)).map(|(&p, q)| p + q).collect();
    if let Some(e) = e {
        check_dim(e.cols(), x.len())?;
        let ex = e.mul_vec(x);
        let s = dot(&ex, &ex);
        value = value + quarter * s * s;
        grad.iter_mut().zip(e.tr_mul_vec(&ex)).for_each(|(g, v)| *g = *g + s * v);
    }
    Ok((value, grad))
}

impl<T: Scalar> Objective<T> for PolyQuartic<T> {
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
        quartic_value_grad(&self.a, &self.b, &self.c, &self.d, self.e.as_ref(), x)
    }

    /// `3AᵀD²A + CᵀC (+ ‖Ex‖² EᵀE + 2 EᵀEx xᵀEᵀE)`, `D = Diag(Ax − b)`.
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        if let Err(e) = check_dim(self.a.cols(), x.len()) {
            return Some(Err(e));
        }
        let three = T::lit(3.0);
        let w: Vec<T> = self
            .a
            .mul_vec(x)
            .iter()
            .zip(&self.b)
            .map(|(&v, &b)| three * (v - b) * (v - b))
            .collect();
        let mut hess = self.a.transpose().weighted_gram(&w);
        let cw = vec![T::one(); self.c.rows()];
        hess = hess.add_scaled(T::one(), &self.c.transpose().weighted_gram(&cw));
        if let Some(e) = &self.e {
            let ex = e.mul_vec(x);
            let s = dot(&ex, &ex);
            let ete = e.transpose().weighted_gram(&vec![T::one(); e.rows()]);
            let v = e.tr_mul_vec(&ex);
            let n = x.len();
            let outer = Matrix::from_fn(n, n, |i, j| v[i] * v[j]);
            hess = hess.add_scaled(s, &ete).add_scaled(T::lit(2.0), &outer);
        }
        Some(Ok(hess))
    }

    fn name(&self) -> String {
        if self.e.is_some() { "quartic+E".to_string() } else { "quartic".to_string() }
    }
}

/// Largest singular value.
pub fn operator_norm<T: Scalar>(m: &Matrix<T>) -> T {
    if m.rows() == 0 || m.cols() == 0 {
        return T::zero();
    }
    singular_values(m)[0]
}

/// Smallest singular value over the column space, zero when the columns are
/// numerically dependent.
fn min_column_singular_value<T: Scalar>(m: &Matrix<T>) -> T {
    if m.rows() < m.cols() || m.cols() == 0 {
        return T::zero();
    }
    let sv = singular_values(m);
    let top = sv[0];
    let low = *sv.last().expect("nonempty");
    if top == T::zero() || low <= T::lit(RANK_TOL) * top {
        T::zero()
    } else {
        low
    }
}

/// `μ = min{σ_E⁴/3, σ_C²}` with `σ` the smallest singular values.
pub fn mu_for_quartic_strong<T: Scalar>(e: &Matrix<T>, c: &Matrix<T>) -> T {
    let se = min_column_singular_value(e);
    let sc = min_column_singular_value(c);
    (se.powi(4) / T::lit(3.0)).min(sc * sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fd_gradient_error, gaussian_matrix};

    #[test]
    fn zero_at_global_minimum() {
        let a = Matrix::identity(2);
        let c = Matrix::identity(2);
        let q = PolyQuartic::new(a, vec![1.0, 2.0], c, vec![1.0, 2.0], None).unwrap();
        let (v, g) = q.value_grad(&[1.0, 2.0]).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn one_dim_arithmetic() {
        let one = Matrix::identity(1);
        let q = PolyQuartic::new(one.clone(), vec![0.0], one, vec![0.0], None).unwrap();
        let (v, g) = q.value_grad(&[2.0]).unwrap();
        assert_eq!(v, 6.0);
        assert_eq!(g, vec![10.0]);
        assert!(fd_gradient_error(&q, &[2.0]) < 1e-6);
    }

    #[test]
    fn random_instance_fd_and_hessian() {
        let q = PolyQuartic::new(
            gaussian_matrix(4, 3, 1),
            vec![0.5, -0.2, 0.1, 0.3],
            gaussian_matrix(2, 3, 2),
            vec![1.0, 0.0],
            Some(gaussian_matrix(3, 3, 3)),
        )
        .unwrap();
        let x = [0.4, -0.7, 1.1];
        assert!(fd_gradient_error(&q, &x) < 1e-6);
        let hess = q.hessian(&x).unwrap().unwrap();
        let step = 1e-6;
        for j in 0..3 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += step;
            xm[j] -= step;
            let gp = q.gradient(&xp).unwrap();
            let gm = q.gradient(&xm).unwrap();
            for i in 0..3 {
                let fd = (gp[i] - gm[i]) / (2.0 * step);
                assert!((fd - hess[(i, j)]).abs() < 1e-5 * (1.0 + hess[(i, j)].abs()));
            }
        }
    }

    #[test]
    fn l_formula_matches_closed_expression() {
        let a = gaussian_matrix(3, 2, 4);
        let c = gaussian_matrix(2, 2, 5);
        let b = vec![0.3, -1.0, 0.7];
        let q = PolyQuartic::new(a.clone(), b.clone(), c.clone(), vec![0.0; 2], None).unwrap();
        let (na, nb, nc) = (operator_norm(&a), norm2(&b), operator_norm(&c));
        let expected: f64 = 3.0 * na.powi(4) + 6.0 * na.powi(3) * nb + 3.0 * na * na * nb * nb + nc * nc;
        assert!((q.relative_l() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&Matrix::<f64>::identity(4)) - 1.0).abs() < 1e-15);
        assert!((operator_norm(&Matrix::from_diag(&[1.0f64, -3.0])) - 3.0).abs() < 1e-15);
        let m = gaussian_matrix(5, 7, 9);
        // Power iteration on MᵀM.
        let mtm = m.transpose().mul(&m);
        let mut v = vec![1.0; 7];
        let mut lambda = 0.0f64;
        for _ in 0..5000 {
            let w = mtm.mul_vec(&v);
            lambda = norm2(&w);
            v = w.iter().map(|x| x / lambda).collect();
        }
        assert!((operator_norm(&m) - lambda.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn mu_examples() {
        let i2 = Matrix::<f64>::identity(2);
        assert!((mu_for_quartic_strong(&i2, &i2) - 1.0 / 3.0).abs() < 1e-15);
        let e = Matrix::from_diag(&[2.0f64]);
        let c = Matrix::from_diag(&[3.0]);
        assert!((mu_for_quartic_strong(&e, &c) - 16.0 / 3.0).abs() < 1e-14);
        let c = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(mu_for_quartic_strong(&i2, &c), 0.0);
    }
}
