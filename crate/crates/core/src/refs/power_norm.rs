use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::oracle::{Objective, Reference, Subsolution};
use crate::rootfind::{solve_monotone_with_derivative, Bracket, DEFAULT_TOL};
use crate::scalar::{dot, norm2, norm_inf, Scalar};

/// `h(x) = ‖x − x^c‖^{r+2}/(r+2) + ‖x − x^c‖²/2` on `Rⁿ`.
#[derive(Debug, Clone)]
pub struct PowerNormRef<T> {
    r: u32,
    center: Vec<T>,
    domain: Domain<T>,
}

impl<T: Scalar> PowerNormRef<T> {
    pub fn new(r: u32, dim: usize) -> Result<Self> {
        Self::with_center(r, vec![T::zero(); dim])
    }

    /// Re-centered variant.
    pub fn with_center(r: u32, center: Vec<T>) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidParameter(format!("power-norm exponent r must be >= 1, got {r}")));
        }
        if center.is_empty() || !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("center must be a finite nonempty vector".into()));
        }
        let domain = Domain::AllSpace { dim: center.len() };
        Ok(Self { r, center, domain })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn center_point(&self) -> &[T] {
        &self.center
    }
}

/// Value and gradient `(1 + ‖z‖^r) z`, `z = x − center`.
pub fn power_norm_value_grad<T: Scalar>(x: &[T], r: u32, center: &[T]) -> Result<(T, Vec<T>)> {
    check_dim(center.len(), x.len())?;
    let z: Vec<T> = x.iter().zip(center).map(|(&a, &b)| a - b).collect();
    let rho = norm2(&z);
    let rho_r = rho.powi(r as i32);
    let value = rho_r * rho * rho / T::from_count(r as usize + 2) + rho * rho / T::lit(2.0);
    let scale = T::one() + rho_r;
    Ok((value, z.iter().map(|&v| scale * v).collect()))
}

/// `|1 − θ − a θ^{r+1}|`.
pub fn power_norm_root_residual<T: Scalar>(a: T, r: u32, theta: T) -> T {
    (T::one() - theta - a * theta.powi(r as i32 + 1)).abs()
}

/// `‖c + (1 + ‖x − center‖^r)(x − center)‖_∞`.
pub fn power_norm_stationarity_residual<T: Scalar>(c: &[T], x: &[T], r: u32, center: &[T]) -> T {
    let z: Vec<T> = x.iter().zip(center).map(|(&a, &b)| a - b).collect();
    let scale = T::one() + norm2(&z).powi(r as i32);
    let res: Vec<T> = c.iter().zip(&z).map(|(&ci, &zi)| ci + scale * zi).collect();
    norm_inf(&res)
}

/// Positive root of `1 − θ − a θ^{r+1} = 0` for `a = ‖c‖^r > 0`.
///
/// Closed forms for `r ∈ {1, 2, 3}` (quadratic formula, hyperbolic Cardano,
/// Ferrari through the resolvent cubic), each followed by Newton polishing to
/// remove cancellation error; other `r` use the bracketed root finder on `[0, 1]`.
pub fn power_norm_theta<T: Scalar>(a: T, r: u32) -> Result<T> {
    if r < 1 {
        return Err(Error::InvalidParameter(format!("r must be >= 1, got {r}")));
    }
    if !(a >= T::zero()) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("a must be finite and nonnegative, got {a}")));
    }
    if a == T::zero() {
        return Ok(T::one());
    }
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let closed = match r {
        1 => Some(two / (T::one() + (T::one() + T::lit(4.0) * a).sqrt())),
        2 => {
            // θ³ + pθ + q = 0 with p = 1/a, q = −1/a; one real root.
            let k = (three * a).sqrt();
            let arg = T::lit(1.5) * k;
            Some(two / k * (arg.asinh() / three).sinh())
        }
        3 => {
            // Resolvent cubic y³ + y/a − 1/(8a²) = 0, then the real quadratic factor.
            let k = (three * a).sqrt();
            let arg = T::lit(3.0 * 3f64.sqrt() / 16.0) / a.sqrt();
            let y = two / k * (arg.asinh() / three).sinh();
            let s = (two * y).sqrt();
            let p = T::one() / a;
            let disc = (two * p / s - s * s).max(T::zero());
            Some((p / s - s * s) / (s + disc.sqrt()))
        }
        _ => None,
    };
    match closed {
        Some(theta) => Ok(polish_theta(a, r, theta)),
        None => power_norm_theta_rootfind(a, r),
    }
}

/// Root of `1 − θ − a θ^{r+1}` via the safeguarded root finder on `[0, 1]`.
pub fn power_norm_theta_rootfind<T: Scalar>(a: T, r: u32) -> Result<T> {
    let e = r as i32;
    let f = |t: T| {
        let tr = t.powi(e);
        (T::one() - t - a * tr * t, -T::one() - a * T::from_count(r as usize + 1) * tr)
    };
    let tol = T::lit(DEFAULT_TOL).max(T::epsilon() * T::lit(8.0));
    Ok(solve_monotone_with_derivative(f, Bracket::hint(T::zero(), T::one()), tol)?.root)
}

fn polish_theta<T: Scalar>(a: T, r: u32, mut theta: T) -> T {
    let e = r as i32;
    theta = theta.max(T::zero()).min(T::one());
    let mut res = power_norm_root_residual(a, r, theta);
    for _ in 0..4 {
        let tr = theta.powi(e);
        let g = T::one() - theta - a * tr * theta;
        let dg = -T::one() - a * T::from_count(r as usize + 1) * tr;
        let next = (theta - g / dg).max(T::zero()).min(T::one());
        let next_res = power_norm_root_residual(a, r, next);
        if next_res >= res {
            break;
        }
        theta = next;
        res = next_res;
    }
    theta
}

/// Solves `argmin ⟨c,x⟩ + ‖x−x^c‖^{r+2}/(r+2) + ‖x−x^c‖²/2` over `Rⁿ`:
/// `x = x^c − θ c` with θ the positive root of `1 − θ − ‖c‖^r θ^{r+1}`.
pub fn power_norm_subproblem<T: Scalar>(c: &[T], r: u32, center: &[T]) -> Result<Subsolution<T>> {
    check_dim(center.len(), c.len())?;
    if !c.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("subproblem coefficient vector".into()));
    }
    let norm_c = norm2(c);
    if norm_c == T::zero() {
        return Ok(Subsolution { x: center.to_vec(), multiplier: Some(T::zero()), residual: T::zero() });
    }
    let a = norm_c.powi(r as i32);
    let theta = power_norm_theta(a, r)?;
    let x = center.iter().zip(c).map(|(&xc, &ci)| xc - theta * ci).collect();
    Ok(Subsolution { x, multiplier: Some(theta), residual: power_norm_root_residual(a, r, theta) })
}

impl<T: Scalar> Objective<T> for PowerNormRef<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        Ok(power_norm_value_grad(x, self.r, &self.center)?.0)
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(power_norm_value_grad(x, self.r, &self.center)?.1)
    }

    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        power_norm_value_grad(x, self.r, &self.center)
    }

    /// `(1 + ρ^r) I + r ρ^{r−2} z zᵀ`.
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        if let Err(e) = check_dim(self.center.len(), x.len()) {
            return Some(Err(e));
        }
        let z: Vec<T> = x.iter().zip(&self.center).map(|(&a, &b)| a - b).collect();
        let rho2 = dot(&z, &z);
        let rho = rho2.sqrt();
        let n = z.len();
        let diag = T::one() + rho.powi(self.r as i32);
        let outer = if rho == T::zero() {
            T::zero()
        } else {
            T::from_count(self.r as usize) * rho.powi(self.r as i32 - 2)
        };
        Some(Ok(Matrix::from_fn(n, n, |i, j| {
            let d = if i == j { diag } else { T::zero() };
            d + outer * z[i] * z[j]
        })))
    }

    fn name(&self) -> String {
        format!("power-norm(r={})", self.r)
    }
}

impl<T: Scalar> Reference<T> for PowerNormRef<T> {
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>> {
        power_norm_subproblem(c, self.r, &self.center)
    }

    fn center(&self) -> Result<Vec<T>> {
        Ok(self.center.clone())
    }

    fn radial_center(&self) -> Option<Vec<T>> {
        Some(self.center.clone())
    }
}
