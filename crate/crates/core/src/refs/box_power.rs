use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::oracle::{Objective, Reference, Subsolution};
use crate::rootfind::{solve_monotone_with_derivative, Bracket, DEFAULT_TOL};
use crate::scalar::Scalar;

/// `h(x) = u³/(2(s+1)) (Σ 1/x_i)^{s+1}` on `(0, u]ⁿ`.
#[derive(Debug, Clone)]
pub struct BoxPowerRef<T> {
    s: u32,
    u: T,
    domain: Domain<T>,
}

impl<T: Scalar> BoxPowerRef<T> {
    pub fn new(s: u32, u: T, dim: usize) -> Result<Self> {
        if !(u > T::zero()) || !u.is_finite() {
            return Err(Error::InvalidParameter(format!("box bound u must be positive and finite, got {u}")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Self { s, u, domain: Domain::OpenBox { dim, upper: u } })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn u(&self) -> T {
        self.u
    }

    fn inv_sum(&self, x: &[T]) -> Result<T> {
        self.domain.require_evaluable(x)?;
        Ok(x.iter().map(|v| v.recip()).sum())
    }
}

/// Solves `argmin_{x∈(0,u]ⁿ} ⟨c,x⟩ + u³/(2(s+1)) (Σ 1/x_i)^{s+1}`.
///
/// With `c' = 2c/u³`, coordinates are `x_i = u` when `c'_i ≤ θ/u²` and
/// `√(θ/c'_i)` otherwise, where θ ≥ `(n/u)^s` is the root of the increasing
/// function `θ − (Σ 1/x_i(θ))^s`.
pub fn box_power_subproblem<T: Scalar>(c: &[T], s: u32, u: T) -> Result<Subsolution<T>> {
    let n = c.len();
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(u > T::zero()) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!("box bound u must be positive and finite, got {u}")));
    }
    if !c.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("subproblem coefficient vector".into()));
    }
    let two = T::lit(2.0);
    let scaled: Vec<T> = c.iter().map(|&ci| two * ci / (u * u * u)).collect();
    let inv_u = u.recip();
    let u2 = u * u;
    let se = s as i32;
    let coords = |theta: T| -> Vec<T> {
        scaled.iter().map(|&ci| if ci <= theta / u2 { u } else { (theta / ci).sqrt() }).collect()
    };
    let g_of = |theta: T| -> (T, T) {
        // G(θ) = Σ 1/x_i(θ) and Σ over unclamped coordinates of √c'_i.
        let mut g = T::zero();
        let mut root_sum = T::zero();
        for &ci in &scaled {
            if ci <= theta / u2 {
                g = g + inv_u;
            } else {
                let r = ci.sqrt();
                g = g + r / theta.sqrt();
                root_sum = root_sum + r;
            }
        }
        (g, root_sum)
    };
    let theta0 = (T::from_count(n) * inv_u).powi(se);
    let theta_hi = g_of(theta0).0.powi(se);
    let theta = if s == 0 || theta_hi <= theta0 {
        // Either the equation is θ = 1, or every coordinate clamps already at θ0.
        if s == 0 { T::one() } else { theta0 }
    } else {
        let d = |theta: T| {
            let (g, root_sum) = g_of(theta);
            let slope = T::one()
                + T::from_count(s as usize) * g.powi(se - 1) * root_sum / (two * theta * theta.sqrt());
            (theta - g.powi(se), slope)
        };
        let tol = T::lit(DEFAULT_TOL).max(T::lit(32.0) * T::epsilon() * theta_hi);
        solve_monotone_with_derivative(d, Bracket::hint(theta0, theta_hi), tol)?.root
    };
    let x = coords(theta);
    let residual = (theta - x.iter().map(|v| v.recip()).sum::<T>().powi(se)).abs();
    Ok(Subsolution { x, multiplier: Some(theta), residual })
}

impl<T: Scalar> Objective<T> for BoxPowerRef<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        let g = self.inv_sum(x)?;
        let u3 = self.u * self.u * self.u;
        Ok(u3 / T::from_count(2 * (self.s as usize + 1)) * g.powi(self.s as i32 + 1))
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        let g = self.inv_sum(x)?;
        let scale = self.u * self.u * self.u / T::lit(2.0) * g.powi(self.s as i32);
        Ok(x.iter().map(|&v| -scale / (v * v)).collect())
    }

    /// `u³ g^s X^{−3} + (u³ s / 2) g^{s−1} X^{−2} e eᵀ X^{−2}`, `g = Σ 1/x_i`.
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        let g = match self.inv_sum(x) {
            Ok(g) => g,
            Err(e) => return Some(Err(e)),
        };
        let u3 = self.u * self.u * self.u;
        let diag = u3 * g.powi(self.s as i32);
        let outer = if self.s == 0 {
            T::zero()
        } else {
            u3 * T::from_count(self.s as usize) / T::lit(2.0) * g.powi(self.s as i32 - 1)
        };
        let inv2: Vec<T> = x.iter().map(|&v| (v * v).recip()).collect();
        let n = x.len();
        Some(Ok(Matrix::from_fn(n, n, |i, j| {
            let d = if i == j { diag / (x[i] * x[i] * x[i]) } else { T::zero() };
            d + outer * inv2[i] * inv2[j]
        })))
    }

    fn name(&self) -> String {
        format!("box-power(s={}, u={})", self.s, self.u)
    }
}

impl<T: Scalar> Reference<T> for BoxPowerRef<T> {
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>> {
        check_dim(self.domain.dim(), c.len())?;
        box_power_subproblem(c, self.s, self.u)
    }

    fn center(&self) -> Result<Vec<T>> {
        Ok(vec![self.u; self.domain.dim()])
    }
}
