use crate::error::{check_dim, Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::objectives::DOptimalDesign;
use crate::scalar::{dot, Scalar};

use super::{Recorder, SolverConfig, SolverResult};

/// Steps between full refactorizations of `M = H X Hᵀ`.
const REFACTOR_EVERY: usize = 50;

/// Exact line-search step towards vertex `j` with leverage `κ = h_jᵀM⁻¹h_j`:
/// maximizing `(m−1) ln(1−λ) + ln(1 − λ + λκ)` gives `λ = (κ − m)/(m(κ − 1))`,
/// and `0` when `κ ≤ m`.
pub fn dopt_line_search_step<T: Scalar>(kappa: T, m: usize) -> T {
    let mt = T::from_count(m);
    if !(kappa > mt) {
        return T::zero();
    }
    ((kappa - mt) / (mt * (kappa - T::one()))).min(T::one())
}

/// Frank–Wolfe state with `M⁻¹` kept current by Sherman–Morrison updates.
struct FwState<'a, T: Scalar> {
    h: &'a Matrix<T>,
    cols: Vec<Vec<T>>,
    x: Vec<T>,
    minv: Matrix<T>,
    kappa: Vec<T>,
    f: T,
    since_refactor: usize,
}

impl<'a, T: Scalar> FwState<'a, T> {
    fn new(design: &'a DOptimalDesign<T>, x0: &[T]) -> Result<Self> {
        let h = design.design();
        check_dim(h.cols(), x0.len())?;
        design.domain_check(x0)?;
        let cols = (0..h.cols()).map(|j| h.column(j)).collect();
        let mut s = Self {
            h,
            cols,
            x: x0.to_vec(),
            minv: Matrix::zeros(h.rows(), h.rows()),
            kappa: vec![T::zero(); h.cols()],
            f: T::zero(),
            since_refactor: 0,
        };
        s.refactor()?;
        Ok(s)
    }

    fn refactor(&mut self) -> Result<()> {
        let chol = Cholesky::new(&self.h.weighted_gram(&self.x))?;
        self.minv = chol.inverse();
        for (k, col) in self.kappa.iter_mut().zip(&self.cols) {
            *k = chol.inv_quad(col);
        }
        self.f = -chol.log_det();
        self.since_refactor = 0;
        Ok(())
    }

    fn best_vertex(&self) -> (usize, T) {
        let mut j = 0;
        for (i, &k) in self.kappa.iter().enumerate() {
            if k > self.kappa[j] {
                j = i;
            }
        }
        (j, self.kappa[j])
    }

    /// `max_j κ_j − m ≥ f(x) − f*`.
    fn gap_estimate(&self) -> T {
        self.best_vertex().1 - T::from_count(self.h.rows())
    }

    /// One Frank–Wolfe step; returns the step length.
    fn step(&mut self) -> Result<T> {
        let m = self.h.rows();
        let (j, kj) = self.best_vertex();
        let lambda = dopt_line_search_step(kj, m);
        if lambda == T::zero() {
            return Ok(lambda);
        }
        let one = T::one();
        let keep = one - lambda;
        self.x.iter_mut().for_each(|v| *v = *v * keep);
        self.x[j] = self.x[j] + lambda;
        if keep <= T::lit(1e-10) || self.since_refactor + 1 >= REFACTOR_EVERY {
            return self.refactor().map(|_| lambda);
        }
        // (1−λ)(M + β h hᵀ) with β = λ/(1−λ).
        let beta = lambda / keep;
        let u = self.minv.mul_vec(&self.cols[j]);
        let denom = one + beta * kj;
        let coef = beta / denom;
        let n = self.minv.rows();
        for r in 0..n {
            for c in 0..n {
                self.minv[(r, c)] = (self.minv[(r, c)] - coef * u[r] * u[c]) / keep;
            }
        }
        for (k, col) in self.kappa.iter_mut().zip(&self.cols) {
            let w = dot(col, &u);
            *k = (*k - coef * w * w) / keep;
        }
        self.f = self.f - T::from_count(m) * keep.ln() - denom.ln();
        self.since_refactor += 1;
        if !self.f.is_finite() || self.kappa.iter().any(|k| !(*k >= T::zero()) || !k.is_finite()) {
            self.refactor()?;
        }
        Ok(lambda)
    }
}

impl<T: Scalar> DOptimalDesign<T> {
    fn domain_check(&self, x: &[T]) -> Result<()> {
        use crate::oracle::Objective;
        self.domain().require_interior(x)
    }
}

/// Classical Frank–Wolfe on the D-optimal design problem with the exact
/// line-search step. The trace reports `f(x^k)`.
pub fn frank_wolfe_dopt<T: Scalar>(design: &DOptimalDesign<T>, x0: &[T], cfg: &SolverConfig<T>) -> SolverResult<T> {
    let mut rec = Recorder::new("fw", cfg, None, None);
    rec.meta_mut().objective = crate::oracle::Objective::name(design);
    let mut state = match cfg.validate().and_then(|_| FwState::new(design, x0)) {
        Ok(s) => s,
        Err(e) => return Err(rec.abort(e)),
    };
    if rec.observe(0, &state.x, state.f, None, false) {
        return Ok(rec.finish());
    }
    for k in 1..=cfg.max_iters {
        let lambda = match state.step() {
            Ok(l) => l,
            Err(e) => return Err(rec.abort(e)),
        };
        let stalled = lambda == T::zero();
        if rec.observe(k, &state.x, state.f, None, k == cfg.max_iters || stalled) || stalled {
            break;
        }
    }
    Ok(rec.finish())
}

/// Result of a long Frank–Wolfe run used as the reference optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct FrankWolfeOracle<T> {
    pub x: Vec<T>,
    pub f: T,
    /// `max_j κ_j − m`, an upper bound on `f(x) − f*`.
    pub gap_estimate: T,
    pub iterations: usize,
}

impl<T: Scalar> FrankWolfeOracle<T> {
    /// `f − gap_estimate ≤ f*`.
    pub fn lower_bound(&self) -> T {
        self.f - self.gap_estimate.max(T::zero())
    }
}

/// Runs Frank–Wolfe until `max_j κ_j − m ≤ tol`; the last iterate is
/// refactorized so that `f` and the gap estimate carry no update drift.
pub fn frank_wolfe_dopt_oracle<T: Scalar>(
    design: &DOptimalDesign<T>,
    x0: &[T],
    tol: T,
    max_iters: usize,
) -> Result<FrankWolfeOracle<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("oracle tolerance must be positive, got {tol}")));
    }
    let mut state = FwState::new(design, x0)?;
    let mut iterations = 0;
    loop {
        if state.gap_estimate() <= tol {
            state.refactor()?;
            if state.gap_estimate() <= tol {
                break;
            }
        }
        if iterations >= max_iters {
            return Err(Error::NonConvergence { iterations, residual: state.gap_estimate().to_f64_lossy() });
        }
        if state.step()? == T::zero() {
            state.refactor()?;
            break;
        }
        iterations += 1;
    }
    Ok(FrankWolfeOracle { gap_estimate: state.gap_estimate(), f: state.f, x: state.x, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Objective;
    use crate::testutil::gaussian_matrix;

    #[test]
    fn line_search_matches_golden_section() {
        for (kappa, m) in [(5.0, 3usize), (3.5, 3), (1.7, 1), (12.0, 4), (4.01, 4)] {
            let phi = |l: f64| (m as f64 - 1.0) * (1.0 - l).ln() + (1.0 - l + l * kappa).ln();
            let (mut a, mut b) = (0.0f64, 1.0 - 1e-12);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..200 {
                let p = b - g * (b - a);
                let q = a + g * (b - a);
                if phi(p) >= phi(q) { b = q } else { a = p }
            }
            let lambda = dopt_line_search_step(kappa, m);
            assert!((lambda - 0.5 * (a + b)).abs() < 1e-6, "kappa={kappa} m={m}");
        }
        assert_eq!(dopt_line_search_step(3.0, 3), 0.0);
        assert_eq!(dopt_line_search_step(2.0, 3), 0.0);
    }

    #[test]
    fn single_row_jumps_to_best_vertex() {
        let h = Matrix::from_rows(&[vec![0.5, -2.0, 1.5, 1.0]]).unwrap();
        let d = DOptimalDesign::new(h).unwrap();
        let o = frank_wolfe_dopt_oracle(&d, &[0.25; 4], 1e-12, 100).unwrap();
        assert!((o.f + 4f64.ln()).abs() < 1e-12);
        assert_eq!(o.x, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn incremental_value_tracks_direct_evaluation() {
        let d = DOptimalDesign::new(gaussian_matrix(3, 10, 2)).unwrap();
        let mut s = FwState::new(&d, &[0.1; 10]).unwrap();
        for _ in 0..(REFACTOR_EVERY - 2) {
            s.step().unwrap();
        }
        let direct = d.value(&s.x).unwrap();
        assert!((s.f - direct).abs() < 1e-9);
        let kappa = d.value_and_kappa(&s.x).unwrap().1;
        for (a, b) in s.kappa.iter().zip(&kappa) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn stationary_point_gives_zero_step() {
        // Orthonormal rows, uniform weights: κ_j = m for every column.
        let h = Matrix::<f64>::from_rows(&[vec![1.0, 0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0, -1.0]]).unwrap();
        let d = DOptimalDesign::new(h).unwrap();
        let mut s = FwState::new(&d, &[0.25; 4]).unwrap();
        assert!((s.best_vertex().1 - 2.0).abs() < 1e-12);
        let x_before = s.x.clone();
        let lambda = s.step().unwrap();
        assert!(lambda.abs() < 1e-12);
        for (a, b) in s.x.iter().zip(&x_before) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_gap_within_log_bound() {
        for seed in 0..5 {
            let d = DOptimalDesign::new(gaussian_matrix(3, 10, seed)).unwrap();
            let o = frank_wolfe_dopt_oracle(&d, &[0.1; 10], 1e-4, 1_000_000).unwrap();
            let f0 = d.value(&[0.1; 10]).unwrap();
            assert!(f0 - o.lower_bound() <= 3.0 * (10.0f64 / 3.0).ln());
            assert!(o.iterations < 100_000, "{}", o.iterations);
        }
    }

    #[test]
    fn fw_trace_is_monotone() {
        let d = DOptimalDesign::new(gaussian_matrix(3, 10, 9)).unwrap();
        let t = frank_wolfe_dopt(&d, &[0.1; 10], &SolverConfig::with_iters(500)).unwrap();
        for w in t.records.windows(2) {
            assert!(w[1].f <= w[0].f + 1e-12);
        }
    }
}
