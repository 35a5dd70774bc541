use std::sync::Arc;

use super::*;
use crate::objectives::{DOptimalDesign, PolyQuartic, UnivariatePolynomial, VolumetricObjective};
use crate::oracle::{Objective, RelSmoothPair};
use crate::refs::{LogBarrierSimplexRef, PowerNormRef, SquaredEuclideanRef};
use crate::solvers::{frank_wolfe_dopt_oracle, primal_gradient, SolverConfig};
use crate::testutil::gaussian_matrix;

/// Hides the analytic Hessian of the wrapped objective.
struct NoHessian<F>(F);

impl<F: Objective<f64>> Objective<f64> for NoHessian<F> {
    fn domain(&self) -> &Domain<f64> {
        self.0.domain()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        self.0.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.gradient(x)
    }
}

fn remark_f() -> UnivariatePolynomial<f64> {
    UnivariatePolynomial::new(vec![3.0, -5.0, 7.0, -4.0, 1.0]).unwrap()
}

/// `¼x⁴ + ½x²`.
fn h_origin() -> UnivariatePolynomial<f64> {
    UnivariatePolynomial::new(vec![0.0, 0.0, 0.5, 0.0, 0.25]).unwrap()
}

/// `¼(x−1)⁴ + ½(x−1)²` expanded.
fn h_shifted() -> UnivariatePolynomial<f64> {
    UnivariatePolynomial::new(vec![0.75, -2.0, 2.0, -1.0, 0.25]).unwrap()
}

fn grid() -> Sampler {
    Sampler::Grid { lo: -10.0, hi: 12.0, points: 22_001 }
}

fn grid_opts() -> CertifyOptions {
    CertifyOptions::new(22_001, 0)
}

#[test]
fn self_pairs_pass_with_equality() {
    let dopt = DOptimalDesign::new(gaussian_matrix(3, 10, 1)).unwrap();
    let vol = VolumetricObjective::new(gaussian_matrix(3, 10, 2), 2).unwrap();
    let lb = LogBarrierSimplexRef::<f64>::new(10).unwrap();
    let simplex = Sampler::Simplex { dim: 10, floor: DEFAULT_FLOOR };
    let quartic =
        PolyQuartic::new(gaussian_matrix(4, 3, 3), vec![0.1; 4], gaussian_matrix(2, 3, 4), vec![0.0; 2], None).unwrap();
    let gauss = Sampler::Gaussian { center: vec![0.0; 3], scale: 2.0 };
    let opts = CertifyOptions::new(1000, 5);
    let cases: [(&dyn Objective<f64>, &Sampler); 4] =
        [(&dopt, &simplex), (&vol, &simplex), (&lb, &simplex), (&quartic, &gauss)];
    for (f, s) in cases {
        let r = check_gradient_monotonicity(f, f, 1.0, 1.0, s, &opts).unwrap();
        assert!(r.pass, "{}: {}", f.name(), r.worst_violation);
        assert!(r.worst_violation <= 0.0, "{}: {}", f.name(), r.worst_violation);
    }
}

#[test]
fn dopt_against_log_barrier() {
    let f = DOptimalDesign::new(gaussian_matrix(3, 10, 7)).unwrap();
    let h = LogBarrierSimplexRef::<f64>::new(10).unwrap();
    let s = Sampler::Simplex { dim: 10, floor: DEFAULT_FLOOR };
    let r = check_gradient_monotonicity(&f, &h, 1.0, 0.0, &s, &CertifyOptions::new(1000, 11)).unwrap();
    assert!(r.pass, "worst {}", r.worst_violation);
    assert_eq!(r.samples, 1000);
    assert_eq!(r.label(), "sampled certificate");
    assert!(r.to_record().contains("label = sampled certificate"));
    let local = Sampler::Local {
        base: Box::new(Sampler::SimplexPowered { dim: 10, power: 4.0, floor: DEFAULT_FLOOR }),
        radius: 0.05,
    };
    let r = check_gradient_monotonicity(&f, &h, 1.0, 0.0, &local, &CertifyOptions::new(2000, 12)).unwrap();
    assert!(r.pass, "worst {}", r.worst_violation);
}

#[test]
fn dopt_half_l_is_refuted_or_inconclusive() {
    let h = LogBarrierSimplexRef::<f64>::new(10).unwrap();
    // The curvature ratio nears 1 only where the mass sits on m coordinates,
    // so pairs are drawn close together near low-dimensional faces.
    let s = Sampler::Local {
        base: Box::new(Sampler::SimplexPowered { dim: 10, power: 4.0, floor: DEFAULT_FLOOR }),
        radius: 0.05,
    };
    let mut refuted = false;
    for seed in 0..5 {
        let f = DOptimalDesign::new(gaussian_matrix(3, 10, 100 + seed)).unwrap();
        let r = check_gradient_monotonicity(&f, &h, 0.5, 0.0, &s, &CertifyOptions::new(1000, seed)).unwrap();
        if !r.pass {
            assert!(r.worst_violation > r.tolerance);
            let w = r.witness.as_ref().unwrap();
            assert_eq!(w.side, Side::Upper);
            // Re-evaluate the witness pair directly.
            let y = w.y.as_ref().unwrap();
            let gf = gradient_gap(&f, &w.x, y).unwrap();
            let gh = gradient_gap(&h, &w.x, y).unwrap();
            assert!(gf > 0.5 * gh);
            refuted = true;
            break;
        }
    }
    if !refuted {
        eprintln!("inconclusive: no witness against L = 0.5 in 5000 pairs");
    }
}

#[test]
fn hessian_grid_shifted_reference() {
    let r = check_hessian_dominance(&remark_f(), &h_shifted(), 4.0, 0.0, &grid(), &grid_opts()).unwrap();
    assert!(r.pass, "worst {}", r.worst_violation);
    let sup = r.max_ratio.unwrap();
    assert!((3.99..=4.0).contains(&sup), "sup ratio {sup}");
    // Ratio (12t²+2)/(3t²+1) at t = x − 1 = −11.
    let edge = (12.0 * 121.0 + 2.0) / (3.0 * 121.0 + 1.0);
    assert!((sup - edge).abs() < 1e-12);
}

#[test]
fn hessian_grid_origin_reference() {
    let l1 = 9.0 + 73f64.sqrt();
    let pass = check_hessian_dominance(&remark_f(), &h_origin(), l1, 0.0, &grid(), &grid_opts()).unwrap();
    assert!(pass.pass, "worst {}", pass.worst_violation);
    assert!(pass.max_ratio.unwrap() <= l1 * (1.0 + 1e-12));
    assert!(pass.max_ratio.unwrap() > 17.54);
    let fail = check_hessian_dominance(&remark_f(), &h_origin(), 17.0, 0.0, &grid(), &grid_opts()).unwrap();
    assert!(!fail.pass);
    let w = fail.witness.unwrap();
    let x = w.x[0];
    let ratio = (12.0 * x * x - 24.0 * x + 14.0) / (3.0 * x * x + 1.0);
    assert!(ratio > 17.0, "witness x = {x}, ratio {ratio}");
}

#[test]
fn volumetric_hessian_dominance() {
    let f = VolumetricObjective::new(gaussian_matrix(3, 8, 13), 2).unwrap();
    let h = LogBarrierSimplexRef::<f64>::new(8).unwrap();
    let s = Sampler::Simplex { dim: 8, floor: DEFAULT_FLOOR };
    let r = check_hessian_dominance(&f, &h, 6.0, 0.0, &s, &CertifyOptions::new(200, 3)).unwrap();
    assert!(r.pass, "worst {}", r.worst_violation);
    assert!(r.max_ratio.unwrap() <= 6.0 * (1.0 + 1e-9));
}

#[test]
fn reports_are_reproducible() {
    let f = DOptimalDesign::new(gaussian_matrix(3, 10, 7)).unwrap();
    let h = LogBarrierSimplexRef::<f64>::new(10).unwrap();
    let s = Sampler::Simplex { dim: 10, floor: DEFAULT_FLOOR };
    for workers in [1, 4] {
        let opts = CertifyOptions { workers, ..CertifyOptions::new(300, 42) };
        let a = check_gradient_monotonicity(&f, &h, 1.0, 0.0, &s, &opts).unwrap();
        let b = check_gradient_monotonicity(&f, &h, 1.0, 0.0, &s, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_record(), b.to_record());
    }
}

#[test]
fn worker_merge_takes_maximum() {
    // Each worker's stream is reproduced separately and the merged worst
    // must equal the maximum over all individual samples.
    let f = remark_f();
    let h = h_origin();
    let s = Sampler::Gaussian { center: vec![1.0], scale: 3.0 };
    let opts = CertifyOptions { workers: 3, ..CertifyOptions::new(90, 9) };
    let merged = check_gradient_monotonicity(&f, &h, 17.0, 0.0, &s, &opts).unwrap();
    let mut best = f64::NEG_INFINITY;
    for w in 0..3 {
        let mut rng = Prng::substream(9, w as u64);
        for _ in (w..90).step_by(3) {
            let x: Vec<f64> = s.draw(&mut rng, 0);
            let y: Vec<f64> = s.draw(&mut rng, 0);
            let gf = gradient_gap(&f, &x, &y).unwrap();
            let gh = gradient_gap(&h, &x, &y).unwrap();
            let up = (gf - 17.0 * gh) / (1.0 + gf.abs() + 17.0 * gh.abs());
            let lo = -gf / (1.0 + gf.abs());
            best = best.max(up).max(lo);
        }
    }
    assert_eq!(merged.worst_violation, best);
}

#[test]
fn sampler_outside_domain_is_an_error() {
    let h = LogBarrierSimplexRef::<f64>::new(3).unwrap();
    let s = Sampler::Gaussian { center: vec![0.0; 3], scale: 1.0 };
    let r = check_gradient_monotonicity(&h, &h, 1.0, 1.0, &s, &CertifyOptions::new(10, 0));
    assert!(matches!(r, Err(Error::DomainViolation(_))));
}

#[test]
fn invalid_options_rejected() {
    let f = remark_f();
    let s = grid();
    assert!(check_gradient_monotonicity(&f, &f, 1.0, 1.0, &s, &CertifyOptions::new(0, 0)).is_err());
    let bad_tol = CertifyOptions { tol: -1.0, ..CertifyOptions::default() };
    assert!(check_gradient_monotonicity(&f, &f, 1.0, 1.0, &s, &bad_tol).is_err());
    assert!(check_hessian_dominance(&f, &f, 1.0, -1.0, &s, &CertifyOptions::default()).is_err());
}

#[test]
fn fd_hessian_fallback_matches_analytic() {
    let f = DOptimalDesign::new(gaussian_matrix(3, 6, 17)).unwrap();
    let x = Prng::new(4).simplex_point::<f64>(6, 0.05);
    let exact = f.hessian(&x).unwrap().unwrap();
    let fd = hessian_or_fd(&NoHessian(f), &x).unwrap();
    let err = fd.add_scaled(-1.0, &exact).max_abs() / exact.max_abs();
    assert!(err < 1e-6, "relative error {err}");
}

#[test]
fn fd_hessian_certificate_agrees() {
    let s = Sampler::Grid { lo: -3.0, hi: 4.0, points: 701 };
    let opts = CertifyOptions::new(701, 0);
    let analytic = check_hessian_dominance(&remark_f(), &h_shifted(), 4.0, 0.0, &s, &opts).unwrap();
    let fd = check_hessian_dominance(&NoHessian(remark_f()), &NoHessian(h_shifted()), 4.0, 0.0, &s, &opts).unwrap();
    assert!(analytic.pass && fd.pass);
    assert!((analytic.max_ratio.unwrap() - fd.max_ratio.unwrap()).abs() < 1e-6);
}

#[test]
fn fd_hessian_of_inconsistent_oracle_is_diagnosed() {
    // (x₁, 0) is not a gradient field, so its difference quotient is asymmetric.
    struct Curl(Domain<f64>);
    impl Objective<f64> for Curl {
        fn domain(&self) -> &Domain<f64> {
            &self.0
        }
        fn value(&self, x: &[f64]) -> Result<f64> {
            Ok(x[0] * x[1])
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![x[1], 0.0])
        }
    }
    let c = Curl(Domain::AllSpace { dim: 2 });
    assert!(matches!(fd_hessian(&c, &[1.0, 1.0]), Err(Error::FiniteDifference(_))));
}

#[test]
fn gradient_checks() {
    let f = PolyQuartic::new(
        gaussian_matrix(4, 3, 1),
        vec![0.5, -0.2, 0.1, 0.3],
        gaussian_matrix(2, 3, 2),
        vec![1.0, 0.0],
        Some(gaussian_matrix(3, 3, 3)),
    )
    .unwrap();
    assert!(gradient_check(&f, &[0.4, -0.7, 1.1]).unwrap() < 1e-6);
    let h = LogBarrierSimplexRef::<f64>::new(5).unwrap();
    let x = [1e-6, 0.2, 0.3, 0.3, 0.2 - 1e-6];
    assert!(gradient_check(&h, &x).unwrap() < 1e-6);
    let wrong = UnivariatePolynomial::new(vec![0.0, 1.0]).unwrap();
    // Objective whose gradient is off by one.
    struct Off(UnivariatePolynomial<f64>);
    impl Objective<f64> for Off {
        fn domain(&self) -> &Domain<f64> {
            self.0.domain()
        }
        fn value(&self, x: &[f64]) -> Result<f64> {
            self.0.value(x)
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![self.0.gradient(x)?[0] + 1.0])
        }
    }
    assert!(gradient_check(&Off(wrong), &[0.5]).unwrap() > 0.4);
}

fn exact_model_trace() -> (IterateTrace<f64>, SquaredEuclideanRef<f64>) {
    let h = Arc::new(SquaredEuclideanRef::<f64>::new(2).unwrap());
    let pair = RelSmoothPair::new(h.clone(), h.clone(), 1.0, 0.0).unwrap();
    let t = primal_gradient(&pair, &[1.0, -2.0], &SolverConfig::with_iters(20)).unwrap();
    (t, SquaredEuclideanRef::new(2).unwrap())
}

#[test]
fn exact_model_within_bound() {
    let (t, h) = exact_model_trace();
    let r = check_bound_on_trace(&t, &h, &[0.0, 0.0], 0.0, BoundKind::PrimalSublinear).unwrap();
    assert!(r.pass);
    assert_eq!(r.samples, t.records.len() - 1);
    for rec in &t.records[1..] {
        assert_eq!(rec.f, 0.0);
    }
}

#[test]
fn dopt_pgs_run_within_bound() {
    let design = DOptimalDesign::new(gaussian_matrix(3, 10, 23)).unwrap();
    let x0 = vec![0.1; 10];
    let oracle = frank_wolfe_dopt_oracle(&design, &x0, 1e-4, 200_000).unwrap();
    let f = Arc::new(design);
    let h = Arc::new(LogBarrierSimplexRef::<f64>::new(10).unwrap());
    let pair = RelSmoothPair::new(f.clone(), h.clone(), 1.0, 0.0).unwrap();
    let mut t = primal_gradient(&pair, &x0, &SolverConfig::with_iters(500)).unwrap();
    let f_star = f.value(&oracle.x).unwrap();
    for kind in [BoundKind::PrimalRate, BoundKind::PrimalSublinear] {
        let r = check_bound_on_trace(&t, h.as_ref(), &oracle.x, f_star, kind).unwrap();
        assert!(r.pass, "{kind}: worst {}", r.worst_violation);
        assert!(r.margin.unwrap() > 0.0);
    }
    attach_bounds(&mut t, h.as_ref(), &oracle.x, f_star, BoundKind::PrimalSublinear).unwrap();
    assert!(t.records[0].gap_bound.is_none());
    for rec in &t.records[1..] {
        assert!(rec.gap.unwrap() <= rec.gap_bound.unwrap());
    }
}

#[test]
fn halved_l_breaks_bound() {
    // f = h = ½x² run with L = 1/2 overshoots: x^{k+1} = −x^k, so the gap
    // stays at ½ while the bound decays like 1/k.
    let h = Arc::new(SquaredEuclideanRef::<f64>::new(1).unwrap());
    let pair = RelSmoothPair::new(h.clone(), h.clone(), 0.5, 0.0).unwrap();
    let t = primal_gradient(&pair, &[1.0], &SolverConfig::with_iters(10)).unwrap();
    let r = check_bound_on_trace(&t, h.as_ref(), &[0.0], 0.0, BoundKind::PrimalSublinear).unwrap();
    assert!(!r.pass);
    assert!(r.margin.unwrap() < 0.0);
    assert_eq!(r.witness.unwrap().index, 10);
}

#[test]
fn missing_metadata_is_an_error() {
    let (mut t, h) = exact_model_trace();
    t.meta.l = None;
    assert!(check_bound_on_trace(&t, &h, &[0.0, 0.0], 0.0, BoundKind::PrimalSublinear).is_err());
    let (mut t, h) = exact_model_trace();
    t.meta.mu = None;
    assert!(attach_bounds(&mut t, &h, &[0.0, 0.0], 0.0, BoundKind::PrimalSublinear).is_err());
}

#[test]
fn dual_distance_needs_center_start() {
    let h = PowerNormRef::<f64>::new(2, 1).unwrap();
    assert!(initial_distance(&h, &[0.0], &[1.0], BoundKind::DualRate).is_err());
    let d = initial_distance(&h, &[1.0], &[0.0], BoundKind::DualSublinear).unwrap();
    assert!((d - h.value(&[1.0]).unwrap()).abs() < 1e-15);
}
