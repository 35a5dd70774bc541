use crate::error::{check_dim, Error, Result};
use crate::oracle::{Reference, RelSmoothPair, Subsolution};
use crate::scalar::{dot, Scalar};

use super::{Recorder, SolverConfig, SolverResult};

/// A convex term `P` handled inside the subproblem rather than through its
/// (sub)gradient.
pub trait CompositePiece<T: Scalar>: Send + Sync {
    fn value(&self, x: &[T]) -> Result<T>;

    /// `argmin_{x∈Q} ⟨c,x⟩ + weight·P(x) + h(x)`.
    fn subproblem(&self, h: &dyn Reference<T>, c: &[T], weight: T) -> Result<Subsolution<T>>;

    /// True for `P ≡ 0`; the reported objective then stays `f` exactly.
    fn is_zero(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// `P ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPiece;

impl<T: Scalar> CompositePiece<T> for ZeroPiece {
    fn value(&self, _x: &[T]) -> Result<T> {
        Ok(T::zero())
    }

    fn subproblem(&self, h: &dyn Reference<T>, c: &[T], _weight: T) -> Result<Subsolution<T>> {
        h.subproblem(c)
    }

    fn is_zero(&self) -> bool {
        true
    }

    fn name(&self) -> String {
        "zero".into()
    }
}

/// `P(x) = ⟨q, x⟩`.
#[derive(Debug, Clone)]
pub struct LinearPiece<T> {
    pub q: Vec<T>,
}

impl<T: Scalar> CompositePiece<T> for LinearPiece<T> {
    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(self.q.len(), x.len())?;
        Ok(dot(&self.q, x))
    }

    fn subproblem(&self, h: &dyn Reference<T>, c: &[T], weight: T) -> Result<Subsolution<T>> {
        check_dim(self.q.len(), c.len())?;
        let shifted: Vec<T> = c.iter().zip(&self.q).map(|(&ci, &qi)| ci + weight * qi).collect();
        h.subproblem(&shifted)
    }

    fn name(&self) -> String {
        "linear".into()
    }
}

/// `P(x) = λ‖x‖₁`, for references that are radial about the origin. The
/// subproblem soft-thresholds `c` at `weight·λ` and then solves the plain
/// reference subproblem: the minimizer lies along `−soft(c)`.
#[derive(Debug, Clone, Copy)]
pub struct L1Piece<T> {
    pub lambda: T,
}

impl<T: Scalar> L1Piece<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("l1 weight must be nonnegative, got {lambda}")));
        }
        Ok(Self { lambda })
    }
}

impl<T: Scalar> CompositePiece<T> for L1Piece<T> {
    fn value(&self, x: &[T]) -> Result<T> {
        Ok(self.lambda * x.iter().map(|v| v.abs()).sum::<T>())
    }

    fn subproblem(&self, h: &dyn Reference<T>, c: &[T], weight: T) -> Result<Subsolution<T>> {
        match h.radial_center() {
            Some(center) if center.iter().all(|v| *v == T::zero()) => {}
            _ => {
                return Err(Error::SubproblemUnavailable(format!(
                    "l1 composite subproblem needs a reference radial about the origin, got {}",
                    h.name()
                )))
            }
        }
        let t = weight * self.lambda;
        let soft: Vec<T> = c.iter().map(|&ci| ci.signum() * (ci.abs() - t).max(T::zero())).collect();
        h.subproblem(&soft)
    }

    fn name(&self) -> String {
        format!("l1({})", self.lambda)
    }
}

/// Composite primal gradient: `x^{i+1} = argmin ⟨∇f(x^i), x⟩ + L·D_h(x, x^i) + P(x)`.
/// The trace reports `f + P`.
pub fn composite_primal_gradient<T: Scalar>(
    pair: &RelSmoothPair<T>,
    piece: &dyn CompositePiece<T>,
    x0: &[T],
    cfg: &SolverConfig<T>,
) -> SolverResult<T> {
    pgs_scheme("cpgs", pair, piece, x0, cfg)
}

pub(crate) fn pgs_scheme<T: Scalar>(
    algorithm: &'static str,
    pair: &RelSmoothPair<T>,
    piece: &dyn CompositePiece<T>,
    x0: &[T],
    cfg: &SolverConfig<T>,
) -> SolverResult<T> {
    let mut rec = Recorder::for_pair(algorithm, cfg, pair);
    if !piece.is_zero() {
        rec.meta_mut().objective = format!("{} + {}", pair.objective.name(), piece.name());
    }
    if let Err(e) = cfg.validate().and_then(|_| pair.domain().require_interior(x0)) {
        return Err(rec.abort(e));
    }
    let f = &pair.objective;
    let h = pair.reference.as_ref();
    let inv_l = T::one() / pair.l;
    let reported = |x: &[T], fx: T| -> Result<T> {
        if piece.is_zero() {
            Ok(fx)
        } else {
            Ok(fx + piece.value(x)?)
        }
    };
    let mut x = x0.to_vec();
    let (fx0, mut g) = match f.value_grad(&x) {
        Ok(v) => v,
        Err(e) => return Err(rec.abort(e)),
    };
    let shown = match reported(&x, fx0) {
        Ok(v) => v,
        Err(e) => return Err(rec.abort(e)),
    };
    if rec.observe(0, &x, shown, None, false) {
        return Ok(rec.finish());
    }
    for k in 1..=cfg.max_iters {
        let step = || -> Result<(Subsolution<T>, Vec<T>, T)> {
            let gh = h.gradient(&x)?;
            let c: Vec<T> = g.iter().zip(&gh).map(|(&gi, &hi)| gi / pair.l - hi).collect();
            let sol = piece.subproblem(h, &c, inv_l)?;
            let (fv, gv) = f.value_grad(&sol.x)?;
            if !fv.is_finite() {
                return Err(Error::NonFinite(format!("objective value at iteration {k}")));
            }
            let shown = reported(&sol.x, fv)?;
            Ok((sol, gv, shown))
        };
        let (sol, gv, shown) = match step() {
            Ok(v) => v,
            Err(e) => return Err(rec.abort(e)),
        };
        x = sol.x;
        g = gv;
        if rec.observe(k, &x, shown, Some(sol.residual), k == cfg.max_iters) {
            break;
        }
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::objectives::{DOptimalDesign, LinearTilt};
    use crate::oracle::Objective;
    use crate::refs::{LogBarrierSimplexRef, PowerNormRef, SquaredEuclideanRef};
    use crate::solvers::primal_gradient;
    use crate::testutil::gaussian_matrix;

    fn dopt_pair(seed: u64) -> RelSmoothPair<f64> {
        let f = Arc::new(DOptimalDesign::new(gaussian_matrix(3, 10, seed)).unwrap());
        let h = Arc::new(LogBarrierSimplexRef::new(10).unwrap());
        RelSmoothPair::new(f, h, 1.0, 0.0).unwrap()
    }

    #[test]
    fn zero_piece_is_bit_identical() {
        let pair = dopt_pair(4);
        let cfg = SolverConfig::with_iters(300);
        let a = primal_gradient(&pair, &[0.1; 10], &cfg).unwrap();
        let b = composite_primal_gradient(&pair, &ZeroPiece, &[0.1; 10], &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn soft_threshold_first_step_matches_grid() {
        let h = Arc::new(SquaredEuclideanRef::<f64>::new(1).unwrap());
        let pair = RelSmoothPair::new(h.clone(), h, 1.0, 1.0).unwrap();
        let piece = L1Piece::new(1.0).unwrap();
        let t = composite_primal_gradient(&pair, &piece, &[3.0], &SolverConfig::with_iters(1)).unwrap();
        let x1 = t.records[1].x[0];
        // Model: f(3) + 3(x − 3) + ½(x − 3)² + |x|.
        let model = |x: f64| 4.5 + 3.0 * (x - 3.0) + 0.5 * (x - 3.0).powi(2) + x.abs();
        let (best, _) = (-40_000..=40_000)
            .map(|i| i as f64 * 1e-4)
            .map(|x| (x, model(x)))
            .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        assert!((x1 - best).abs() <= 1e-4);
        assert_eq!(x1, 0.0);
    }

    #[test]
    fn l1_with_power_norm_beats_random_points() {
        let h = PowerNormRef::<f64>::new(2, 3).unwrap();
        let piece = L1Piece::new(0.7).unwrap();
        let c = [1.5, -0.2, -2.0];
        let w = 0.5;
        let sol = piece.subproblem(&h, &c, w).unwrap();
        let obj = |x: &[f64]| dot(&c, x) + w * piece.value(x).unwrap() + h.value(x).unwrap();
        let best = obj(&sol.x);
        let mut rng = crate::rng::Prng::new(5);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
            assert!(best <= obj(&x) + 1e-12);
        }
        assert_eq!(sol.x[1], 0.0);
    }

    #[test]
    fn l1_rejects_non_radial_reference() {
        let h = LogBarrierSimplexRef::<f64>::new(3).unwrap();
        assert!(L1Piece::new(1.0).unwrap().subproblem(&h, &[0.0; 3], 1.0).is_err());
    }

    #[test]
    fn linear_piece_matches_tilted_objective() {
        let pair = dopt_pair(8);
        let q: Vec<f64> = (0..10).map(|j| 0.05 * j as f64 - 0.2).collect();
        let cfg = SolverConfig::with_iters(200);
        let comp = composite_primal_gradient(&pair, &LinearPiece { q: q.clone() }, &[0.1; 10], &cfg).unwrap();
        let tilted: Arc<dyn Objective<f64>> = Arc::new(LinearTilt::new(pair.objective.clone(), q).unwrap());
        let tpair = RelSmoothPair::new(tilted, pair.reference.clone(), 1.0, 0.0).unwrap();
        let plain = primal_gradient(&tpair, &[0.1; 10], &cfg).unwrap();
        for (a, b) in comp.records.iter().zip(&plain.records) {
            assert!((a.f - b.f).abs() <= 1e-10 * (1.0 + b.f.abs()));
            for (u, v) in a.x.iter().zip(&b.x) {
                assert!((u - v).abs() <= 1e-10);
            }
        }
    }
}
