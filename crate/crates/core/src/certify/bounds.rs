use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closed-form convergence bounds.
///
/// Primal kinds bound `f(x^k) − f(x)` for the primal gradient scheme with
/// `D0 = D_h(x, x⁰)`; dual kinds bound `min_{i≤k} f(x^i) − f(x)` for dual
/// averaging with `D0 = h(x) − h(x⁰)`, `x⁰` the h-center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `μ D0 / ((1 + μ/(L−μ))^k − 1)`, equal to `L·D0/k` at `μ = 0`.
    PrimalRate,
    /// `(L−μ) D0 / k`.
    PrimalSublinear,
    /// `L (1 − μ/L)^k D0`.
    PrimalGeometric,
    /// Same expression as [`BoundKind::PrimalRate`] with the dual `D0`.
    DualRate,
    /// Same expression as [`BoundKind::PrimalSublinear`] with the dual `D0`.
    DualSublinear,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::PrimalRate,
        BoundKind::PrimalSublinear,
        BoundKind::PrimalGeometric,
        BoundKind::DualRate,
        BoundKind::DualSublinear,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::PrimalRate => "primal-rate",
            BoundKind::PrimalSublinear => "primal-sublinear",
            BoundKind::PrimalGeometric => "primal-geometric",
            BoundKind::DualRate => "dual-rate",
            BoundKind::DualSublinear => "dual-sublinear",
        }
    }

    /// Whether `D0` is `h(x) − h(x⁰)` rather than a Bregman distance.
    pub fn is_dual(self) -> bool {
        matches!(self, BoundKind::DualRate | BoundKind::DualSublinear)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bound kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery<T> {
    pub l: T,
    pub mu: T,
    pub k: u64,
    pub d0: T,
    pub kind: BoundKind,
}

impl<T: Scalar> BoundQuery<T> {
    pub fn new(l: T, mu: T, k: u64, d0: T, kind: BoundKind) -> Self {
        Self { l, mu, k, d0, kind }
    }

    pub fn validate(&self) -> Result<()> {
        let BoundQuery { l, mu, k, d0, .. } = *self;
        if !(l.is_finite() && mu.is_finite() && d0.is_finite()) {
            return Err(Error::NonFinite("bound parameters".into()));
        }
        if mu < T::zero() {
            return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
        }
        if mu >= l {
            return Err(Error::InvalidParameter(format!("bound needs mu < L, got mu = {mu}, L = {l}")));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("bound needs k >= 1".into()));
        }
        if d0 < T::zero() {
            return Err(Error::InvalidParameter(format!("D0 must be >= 0, got {d0:e}")));
        }
        Ok(())
    }
}

pub fn eval_bound<T: Scalar>(q: &BoundQuery<T>) -> Result<T> {
    q.validate()?;
    let BoundQuery { l, mu, k, d0, kind } = *q;
    let kf = T::lit(k as f64);
    let value = match kind {
        BoundKind::PrimalRate | BoundKind::DualRate => {
            if mu == T::zero() {
                l * d0 / kf
            } else {
                // (1 + μ/(L−μ))^k − 1 without cancellation for small μ.
                let denom = (kf * (mu / (l - mu)).ln_1p()).exp_m1();
                mu * d0 / denom
            }
        }
        BoundKind::PrimalSublinear | BoundKind::DualSublinear => (l - mu) * d0 / kf,
        BoundKind::PrimalGeometric => l * d0 * (kf * (-mu / l).ln_1p()).exp(),
    };
    Ok(value)
}

/// Iterations `⌈2n ln(2·gap0/ε)/ε⌉` after which the log-barrier scheme on
/// D-optimal design started at `e/n` has `f(x^k) − f* ≤ ε`.
pub fn dopt_iteration_bound(n: usize, gap0: f64, eps: f64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(eps > 0.0) || !eps.is_finite() || !gap0.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite eps > 0, got eps = {eps}, gap0 = {gap0}")));
    }
    if eps > gap0 {
        return Err(Error::InvalidParameter(format!(
            "iteration bound assumes eps <= f(x0) - f*, got eps = {eps} > {gap0}"
        )));
    }
    let k = (2.0 * n as f64 * (2.0 * gap0 / eps).ln() / eps).ceil();
    Ok(k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(kind: BoundKind, l: f64, mu: f64, k: u64, d0: f64) -> f64 {
        eval_bound(&BoundQuery::new(l, mu, k, d0, kind)).unwrap()
    }

    #[test]
    fn sublinear_example() {
        assert!((q(BoundKind::PrimalSublinear, 4.0, 0.0, 10, 2.0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rate_example() {
        assert!((q(BoundKind::PrimalRate, 2.0, 1.0, 1, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rate_by_direct_power() {
        // μD0 / ((1 + μ/(L−μ))^k − 1) evaluated with plain powi.
        for &(l, mu, k, d0) in &[(3.0, 1.0, 5u64, 0.7), (10.0, 0.5, 40, 2.0), (1.5, 1.0, 3, 1.0)] {
            let direct: f64 = mu * d0 / ((1.0f64 + mu / (l - mu)).powi(k as i32) - 1.0);
            let got = q(BoundKind::PrimalRate, l, mu, k, d0);
            assert!((got - direct).abs() <= 1e-13 * direct);
            assert_eq!(q(BoundKind::DualRate, l, mu, k, d0), got);
        }
    }

    #[test]
    fn geometric_dominates_rate_for_small_case() {
        for k in 1..=200 {
            assert!(q(BoundKind::PrimalRate, 2.0, 1.0, k, 1.0) <= q(BoundKind::PrimalGeometric, 2.0, 1.0, k, 1.0));
        }
    }

    #[test]
    fn geometric_dominates_rate_on_grid() {
        for li in 1..=10 {
            let l = li as f64;
            for mi in 1..=10 {
                let mu = l * mi as f64 / 11.0;
                for k in 1..=200u64 {
                    let d0 = 1.0 + (k % 7) as f64;
                    let rate = q(BoundKind::PrimalRate, l, mu, k, d0);
                    let geo = q(BoundKind::PrimalGeometric, l, mu, k, d0);
                    assert!(rate <= geo * (1.0 + 1e-12), "L={l} mu={mu} k={k}: {rate} > {geo}");
                }
            }
        }
    }

    #[test]
    fn rate_tends_to_sublinear_limit() {
        let (l, k, d0) = (2.0, 25, 3.0);
        let limit = q(BoundKind::PrimalSublinear, l, 0.0, k, d0);
        assert_eq!(q(BoundKind::PrimalRate, l, 0.0, k, d0), limit);
        let mut prev = f64::INFINITY;
        for mu in [1e-3, 1e-6, 1e-9] {
            let err = ((q(BoundKind::PrimalRate, l, mu, k, d0) - limit) / limit).abs();
            assert!(err < prev, "mu = {mu}: {err} vs {prev}");
            prev = err;
        }
        assert!(prev < 1e-7);
    }

    #[test]
    fn rate_never_exceeds_sublinear() {
        for k in 1..50 {
            let r = q(BoundKind::PrimalRate, 5.0, 2.0, k, 1.0);
            assert!(r <= q(BoundKind::PrimalSublinear, 5.0, 2.0, k, 1.0) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn invalid_queries() {
        let bad = [
            BoundQuery::new(1.0, 1.0, 1, 1.0, BoundKind::PrimalRate),
            BoundQuery::new(1.0, 2.0, 1, 1.0, BoundKind::PrimalSublinear),
            BoundQuery::new(1.0, 0.0, 0, 1.0, BoundKind::PrimalSublinear),
            BoundQuery::new(1.0, 0.0, 1, -1.0, BoundKind::DualRate),
            BoundQuery::new(1.0, -0.1, 1, 1.0, BoundKind::PrimalGeometric),
            BoundQuery::new(f64::NAN, 0.0, 1, 1.0, BoundKind::PrimalGeometric),
        ];
        for b in bad {
            assert!(eval_bound(&b).is_err(), "{b:?}");
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(k.as_str().parse::<BoundKind>().unwrap(), k);
        }
        assert!("nope".parse::<BoundKind>().is_err());
    }

    #[test]
    fn dopt_iteration_examples() {
        assert_eq!(dopt_iteration_bound(10, 1.0, 1.0).unwrap(), 14);
        assert_eq!(dopt_iteration_bound(10, 2.0, 0.01).unwrap(), 11983);
        let boundary = dopt_iteration_bound(4, 0.5, 0.5).unwrap();
        assert_eq!(boundary, (8.0 * 2f64.ln() / 0.5).ceil() as u64);
        assert!(dopt_iteration_bound(10, 0.5, 1.0).is_err());
        assert!(dopt_iteration_bound(10, 1.0, 0.0).is_err());
    }
}
