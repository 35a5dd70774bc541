//! Certificate calculus: nonnegative combinations of relatively smooth pairs
//! and precomposition with a linear map.

use std::sync::Arc;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oracle::{Objective, Reference, RelSmoothPair, Subsolution};
use crate::scalar::Scalar;

/// `Σ wᵢ fᵢ` over functions sharing one domain.
pub struct SumObjective<T: Scalar> {
    domain: Domain<T>,
    terms: Vec<(T, Arc<dyn Objective<T>>)>,
}

impl<T: Scalar> SumObjective<T> {
    pub fn new(terms: Vec<(T, Arc<dyn Objective<T>>)>) -> Result<Self> {
        let domain = shared_domain(terms.iter().map(|(_, f)| f.domain()))?;
        Ok(Self { domain, terms })
    }
}

impl<T: Scalar> Objective<T> for SumObjective<T> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    fn value(&self, x: &[T]) -> Result<T> {
        let mut acc = T::zero();
        for (w, f) in &self.terms {
            if *w != T::zero() {
                acc = acc + *w * f.value(x)?;
            }
        }
        Ok(acc)
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.value_grad(x)?.1)
    }

    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        let mut v = T::zero();
        let mut g = vec![T::zero(); x.len()];
        for (w, f) in &self.terms {
            if *w == T::zero() {
                continue;
            }
            let (fv, fg) = f.value_grad(x)?;
            v = v + *w * fv;
            g.iter_mut().zip(&fg).for_each(|(a, &b)| *a = *a + *w * b);
        }
        Ok((v, g))
    }

    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        let n = x.len();
        let mut acc = Matrix::zeros(n, n);
        for (w, f) in &self.terms {
            if *w == T::zero() {
                continue;
            }
            match f.hessian(x)? {
                Ok(h) => acc = acc.add_scaled(*w, &h),
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(acc))
    }

    fn name(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(w, f)| format!("{w}*{}", f.name())).collect();
        parts.join(" + ")
    }
}

/// `Σ wᵢ hᵢ` as a reference. The subproblem is available when exactly one
/// term carries nonzero weight (a rescaled single reference).
pub struct SumReference<T: Scalar> {
    sum: SumObjective<T>,
    refs: Vec<(T, Arc<dyn Reference<T>>)>,
}

impl<T: Scalar> SumReference<T> {
    pub fn new(terms: Vec<(T, Arc<dyn Reference<T>>)>) -> Result<Self> {
        let as_obj = terms
            .iter()
            .map(|(w, h)| (*w, h.clone() as Arc<dyn Objective<T>>))
            .collect();
        Ok(Self { sum: SumObjective::new(as_obj)?, refs: terms })
    }
}

impl<T: Scalar> Objective<T> for SumReference<T> {
    fn domain(&self) -> &Domain<T> {
        self.sum.domain()
    }
    fn value(&self, x: &[T]) -> Result<T> {
        self.sum.value(x)
    }
    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.sum.gradient(x)
    }
    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        self.sum.value_grad(x)
    }
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        self.sum.hessian(x)
    }
    fn name(&self) -> String {
        self.sum.name()
    }
}

impl<T: Scalar> Reference<T> for SumReference<T> {
    fn subproblem(&self, c: &[T]) -> Result<Subsolution<T>> {
        let mut active = self.refs.iter().filter(|(w, _)| *w != T::zero());
        match (active.next(), active.next()) {
            // argmin ⟨c,x⟩ + w h(x) = argmin ⟨c/w,x⟩ + h(x)
            (Some((w, h)), None) => {
                let scaled: Vec<T> = c.iter().map(|&ci| ci / *w).collect();
                h.subproblem(&scaled)
            }
            (None, _) => Err(Error::SubproblemUnavailable("reference has no positive-weight term".into())),
            _ => Err(Error::SubproblemUnavailable(
                "linearized subproblem of a sum of distinct references".into(),
            )),
        }
    }
}

fn shared_domain<'a, T: Scalar + 'a>(mut domains: impl Iterator<Item = &'a Domain<T>>) -> Result<Domain<T>> {
    let first = domains
        .next()
        .ok_or_else(|| Error::InvalidParameter("combination needs at least one term".into()))?
        .clone();
    for d in domains {
        if *d != first {
            return Err(Error::InvalidParameter(format!(
                "mismatched domains: {} vs {}",
                first.name(),
                d.name()
            )));
        }
    }
    Ok(first)
}

/// Combines `(fᵢ ⪯ Lᵢ hᵢ, fᵢ ⪰ μᵢ hᵢ)` with weights `αᵢ ≥ 0` into
/// `Σαᵢfᵢ ⪯ Σαᵢ Lᵢ hᵢ` (so `L = 1`). The combined strong-convexity constant
/// relative to the new reference is `min μᵢ/Lᵢ` over positive weights, since
/// `Σαᵢμᵢhᵢ − (min μⱼ/Lⱼ) Σαᵢ Lᵢ hᵢ` is a nonnegative combination of convex
/// functions.
pub fn combine_certificates<T: Scalar>(pairs: &[(RelSmoothPair<T>, T)]) -> Result<RelSmoothPair<T>> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no pairs to combine".into()));
    }
    if pairs.iter().any(|(_, w)| !(*w >= T::zero()) || !w.is_finite()) {
        return Err(Error::InvalidParameter("weights must be nonnegative and finite".into()));
    }
    if pairs.iter().all(|(_, w)| *w == T::zero()) {
        return Err(Error::InvalidParameter("at least one weight must be positive".into()));
    }
    let objective = SumObjective::new(pairs.iter().map(|(p, w)| (*w, p.objective.clone())).collect())?;
    let reference = SumReference::new(pairs.iter().map(|(p, w)| (*w * p.l, p.reference.clone())).collect())?;
    let mu = pairs
        .iter()
        .filter(|(_, w)| *w > T::zero())
        .map(|(p, _)| p.mu / p.l)
        .fold(T::infinity(), T::min);
    RelSmoothPair::new(Arc::new(objective), Arc::new(reference), T::one(), mu)
}

/// `x ↦ f(A x)`.
pub struct Composed<T: Scalar, F: ?Sized> {
    inner: Arc<F>,
    map: Arc<Matrix<T>>,
    domain: Domain<T>,
}

impl<T: Scalar, F: Objective<T> + ?Sized> Composed<T, F> {
    pub fn new(inner: Arc<F>, map: Arc<Matrix<T>>) -> Result<Self> {
        if map.rows() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: inner.dim(), got: map.rows() });
        }
        let domain = match inner.domain() {
            Domain::AllSpace { .. } => Domain::AllSpace { dim: map.cols() },
            other => Domain::Preimage { map: map.clone(), inner: Box::new(other.clone()) },
        };
        Ok(Self { inner, map, domain })
    }
}

impl<T: Scalar, F: Objective<T> + ?Sized> Objective<T> for Composed<T, F> {
    fn domain(&self) -> &Domain<T> {
        &self.domain
    }
    fn value(&self, x: &[T]) -> Result<T> {
        crate::error::check_dim(self.map.cols(), x.len())?;
        self.inner.value(&self.map.mul_vec(x))
    }
    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        crate::error::check_dim(self.map.cols(), x.len())?;
        Ok(self.map.tr_mul_vec(&self.inner.gradient(&self.map.mul_vec(x))?))
    }
    fn value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        crate::error::check_dim(self.map.cols(), x.len())?;
        let (v, g) = self.inner.value_grad(&self.map.mul_vec(x))?;
        Ok((v, self.map.tr_mul_vec(&g)))
    }
    fn hessian(&self, x: &[T]) -> Option<Result<Matrix<T>>> {
        let inner = self.inner.hessian(&self.map.mul_vec(x))?;
        Some(inner.map(|h| {
            let mut out = self.map.congruence(&h);
            out.symmetrize();
            out
        }))
    }
    fn name(&self) -> String {
        format!("{}∘A", self.inner.name())
    }
}

impl<T: Scalar, F: Reference<T> + ?Sized> Reference<T> for Composed<T, F> {
    fn subproblem(&self, _c: &[T]) -> Result<Subsolution<T>> {
        Err(Error::SubproblemUnavailable("linearized subproblem of h(Ax) for general A".into()))
    }
}

/// `(f ∘ A, h ∘ A)` keeps `L` and `μ`.
pub fn affine_precompose<T: Scalar>(pair: &RelSmoothPair<T>, map: Matrix<T>) -> Result<RelSmoothPair<T>> {
    let map = Arc::new(map);
    let objective = Composed::new(pair.objective.clone(), map.clone())?;
    let reference = Composed::new(pair.reference.clone(), map)?;
    RelSmoothPair::new(Arc::new(objective), Arc::new(reference), pair.l, pair.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{check_gradient_monotonicity, check_hessian_dominance, CertifyOptions, Sampler};
    use crate::linalg::sym_eigenvalues;
    use crate::objectives::Quadratic;
    use crate::refs::{LogBarrierSimplexRef, PowerNormRef, SquaredEuclideanRef};
    use crate::rng::Prng;
    use crate::testutil::gaussian_matrix;

    /// `GᵀG + shift·I`, positive definite for `shift > 0`.
    fn spd(n: usize, seed: u64, shift: f64) -> Matrix<f64> {
        let g = gaussian_matrix(n, n, seed);
        g.transpose().mul(&g).add_scaled(shift, &Matrix::identity(n))
    }

    fn quadratic_pair(seed: u64) -> RelSmoothPair<f64> {
        let q = spd(3, seed, 0.5);
        let ev = sym_eigenvalues(&q).unwrap();
        let f = Arc::new(Quadratic::new(q, vec![0.0; 3]).unwrap());
        let h = Arc::new(SquaredEuclideanRef::new(3).unwrap());
        RelSmoothPair::new(f, h, ev[2], ev[0]).unwrap()
    }

    #[test]
    fn single_pair_rescales_reference() {
        let p = quadratic_pair(1);
        let c = combine_certificates(&[(p.clone(), 1.0)]).unwrap();
        assert_eq!(c.l, 1.0);
        assert!((c.mu - p.mu / p.l).abs() < 1e-15);
        let mut rng = Prng::new(2);
        for _ in 0..20 {
            let x: Vec<f64> = rng.normal_vec(3);
            assert_eq!(c.objective.value(&x).unwrap(), p.objective.value(&x).unwrap());
            let expected = p.l * p.reference.value(&x).unwrap();
            assert!((c.reference.value(&x).unwrap() - expected).abs() <= 1e-14 * (1.0 + expected.abs()));
        }
        // argmin ⟨c,x⟩ + L·½‖x‖² = −c/L.
        let s = c.reference.subproblem(&[1.0, -2.0, 4.0]).unwrap();
        for (xi, ci) in s.x.iter().zip([1.0, -2.0, 4.0]) {
            assert!((xi + ci / p.l).abs() < 1e-15);
        }
    }

    #[test]
    fn two_quadratics_combined_hessian_dominance() {
        let q1 = spd(3, 3, 0.1);
        let q2 = spd(3, 4, 0.1);
        let l1 = sym_eigenvalues(&q1).unwrap()[2];
        let l2 = sym_eigenvalues(&q2).unwrap()[2];
        let h1: Arc<dyn Reference<f64>> = Arc::new(SquaredEuclideanRef::new(3).unwrap());
        // ∇²h₂ = (1+‖x‖²)I + 2xxᵀ ⪰ I, so ∇²f₂ ⪯ λ_max(Q₂)∇²h₂.
        let h2: Arc<dyn Reference<f64>> = Arc::new(PowerNormRef::new(2, 3).unwrap());
        let p1 = RelSmoothPair::new(Arc::new(Quadratic::new(q1, vec![0.0; 3]).unwrap()), h1, l1, 0.0).unwrap();
        let p2 = RelSmoothPair::new(Arc::new(Quadratic::new(q2, vec![0.0; 3]).unwrap()), h2, l2, 0.0).unwrap();
        let c = combine_certificates(&[(p1, 1.0), (p2, 1.0)]).unwrap();
        let s = Sampler::Gaussian { center: vec![0.0; 3], scale: 1.5 };
        let r = check_hessian_dominance(c.objective.as_ref(), c.reference.as_ref(), c.l, c.mu, &s, &CertifyOptions::new(100, 5))
            .unwrap();
        assert!(r.pass, "worst {}", r.worst_violation);
        assert!(matches!(c.reference.subproblem(&[0.0; 3]), Err(Error::SubproblemUnavailable(_))));
    }

    #[test]
    fn zero_weight_term_drops_out() {
        let p1 = quadratic_pair(6);
        let p2 = quadratic_pair(7);
        let single = combine_certificates(&[(p1.clone(), 1.0)]).unwrap();
        let both = combine_certificates(&[(p1, 1.0), (p2, 0.0)]).unwrap();
        assert_eq!(both.mu, single.mu);
        let x = [0.3, -1.2, 0.8];
        assert_eq!(both.objective.value(&x).unwrap(), single.objective.value(&x).unwrap());
        assert_eq!(both.reference.gradient(&x).unwrap(), single.reference.gradient(&x).unwrap());
        assert_eq!(both.reference.subproblem(&x).unwrap().x, single.reference.subproblem(&x).unwrap().x);
    }

    #[test]
    fn combination_rejects_bad_input() {
        let p = quadratic_pair(1);
        let lb: Arc<dyn Reference<f64>> = Arc::new(LogBarrierSimplexRef::new(3).unwrap());
        let other = RelSmoothPair::new(lb.clone(), lb, 1.0, 1.0).unwrap();
        assert!(combine_certificates(&[(p.clone(), 1.0), (other, 1.0)]).is_err());
        assert!(combine_certificates(&[(p.clone(), -1.0)]).is_err());
        assert!(combine_certificates(&[(p, 0.0)]).is_err());
        assert!(combine_certificates::<f64>(&[]).is_err());
    }

    #[test]
    fn identity_precomposition_is_transparent() {
        let p = quadratic_pair(8);
        let c = affine_precompose(&p, Matrix::identity(3)).unwrap();
        assert_eq!((c.l, c.mu), (p.l, p.mu));
        let mut rng = Prng::new(9);
        for _ in 0..20 {
            let x: Vec<f64> = rng.normal_vec(3);
            assert_eq!(c.objective.value(&x).unwrap(), p.objective.value(&x).unwrap());
            assert_eq!(c.objective.gradient(&x).unwrap(), p.objective.gradient(&x).unwrap());
            assert_eq!(c.reference.gradient(&x).unwrap(), p.reference.gradient(&x).unwrap());
        }
    }

    #[test]
    fn doubling_map_chain_rule() {
        let f: Arc<dyn Objective<f64>> = Arc::new(SquaredEuclideanRef::new(2).unwrap());
        let a = Arc::new(Matrix::identity(2).scaled(2.0));
        let phi = Composed::new(f, a).unwrap();
        assert_eq!(phi.gradient(&[1.5, -0.5]).unwrap(), vec![6.0, -2.0]);
    }

    #[test]
    fn random_map_keeps_monotonicity() {
        let h: Arc<dyn Reference<f64>> = Arc::new(PowerNormRef::new(2, 4).unwrap());
        let q = spd(4, 10, 0.0);
        let l = sym_eigenvalues(&q).unwrap()[3];
        let f = Arc::new(Quadratic::new(q, vec![0.0; 4]).unwrap());
        let pair = RelSmoothPair::new(f, h, l, 0.0).unwrap();
        let c = affine_precompose(&pair, gaussian_matrix(4, 3, 11)).unwrap();
        let s = Sampler::Gaussian { center: vec![0.0; 3], scale: 1.0 };
        let r = check_gradient_monotonicity(c.objective.as_ref(), c.reference.as_ref(), c.l, c.mu, &s, &CertifyOptions::new(500, 1))
            .unwrap();
        assert!(r.pass, "worst {}", r.worst_violation);
    }

    #[test]
    fn precomposition_dimension_mismatch() {
        let p = quadratic_pair(1);
        assert!(affine_precompose(&p, gaussian_matrix(2, 2, 1)).is_err());
    }
}
