//! Sampled checks of relative smoothness and strong convexity, closed-form
//! convergence bounds, and checks of recorded runs against those bounds.
//!
//! Sampled checks can only refute: a pass is a "sampled certificate" over
//! finitely many interior points, not a proof.

mod bounds;
mod sampler;

use std::fmt::{self, Write as _};

pub use bounds::{dopt_iteration_bound, eval_bound, BoundKind, BoundQuery};
pub use sampler::{Sampler, DEFAULT_FLOOR};

use crate::bregman::{bregman_distance, gradient_gap};
use crate::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{sym_eigenvalues, Cholesky, Matrix};
use crate::oracle::Objective;
use crate::rng::Prng;
use crate::scalar::{norm2, Scalar};
use crate::trace::IterateTrace;

/// Relative tolerance used unless a caller asks otherwise.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Sample count used unless a caller asks otherwise.
pub const DEFAULT_SAMPLES: usize = 1000;
/// Slack of trace bound checks, scaled by `1 + |f*|`.
pub const TRACE_SLACK: f64 = 1e-9;

const FD_GRADIENT_STEP: f64 = 1e-5;
const FD_HESSIAN_STEP: f64 = 1e-4;
const FD_MAX_HALVINGS: usize = 60;
/// Relative asymmetry above which a finite-difference Hessian is rejected.
const FD_ASYMMETRY_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `μ⟨∇h(x)−∇h(y), x−y⟩ ≤ ⟨∇f(x)−∇f(y), x−y⟩ ≤ L⟨∇h(x)−∇h(y), x−y⟩`.
    GradientMonotonicity,
    /// `μ∇²h(x) ⪯ ∇²f(x) ⪯ L∇²h(x)`.
    HessianDominance,
    /// Recorded gaps against a closed-form bound.
    TraceBound(BoundKind),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::GradientMonotonicity => f.write_str("gradient-monotonicity"),
            Condition::HessianDominance => f.write_str("hessian-dominance"),
            Condition::TraceBound(k) => write!(f, "trace-bound/{k}"),
        }
    }
}

/// Which inequality the worst sample violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Smoothness: the `L` side.
    Upper,
    /// Strong convexity: the `μ` side.
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Vec<f64>,
    /// Second point of the pair, for pairwise conditions.
    pub y: Option<Vec<f64>>,
    pub side: Side,
    /// Sample index (record index for trace checks).
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub condition: Condition,
    pub samples: usize,
    /// Largest normalized violation over all samples; `≤ 0` means every
    /// inequality held with room to spare.
    pub worst_violation: f64,
    pub worst_upper: f64,
    pub worst_lower: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub l: f64,
    pub mu: f64,
    /// Sample attaining `worst_violation`.
    pub witness: Option<Witness>,
    /// Extremes of the generalized eigenvalues of `∇²f` relative to `∇²h`.
    pub max_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    /// Smallest `bound − gap` over the trace.
    pub margin: Option<f64>,
}

impl CertificateReport {
    pub fn label(&self) -> &'static str {
        match self.condition {
            Condition::TraceBound(_) => "trace bound check",
            _ => "sampled certificate",
        }
    }

    /// `key = value` lines, one per field.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "label = {}", self.label());
        let _ = writeln!(out, "condition = {}", self.condition);
        let _ = writeln!(out, "pass = {}", self.pass);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "L = {:.16e}", self.l);
        let _ = writeln!(out, "mu = {:.16e}", self.mu);
        let _ = writeln!(out, "tolerance = {:.16e}", self.tolerance);
        let _ = writeln!(out, "worst_violation = {:.16e}", self.worst_violation);
        let _ = writeln!(out, "worst_upper = {:.16e}", self.worst_upper);
        let _ = writeln!(out, "worst_lower = {:.16e}", self.worst_lower);
        for (key, v) in [("max_ratio", self.max_ratio), ("min_ratio", self.min_ratio), ("margin", self.margin)] {
            if let Some(v) = v {
                let _ = writeln!(out, "{key} = {v:.16e}");
            }
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness_index = {}", w.index);
            let _ = writeln!(out, "witness_side = {:?}", w.side);
            let _ = writeln!(out, "witness_x = {}", fmt_vec(&w.x));
            if let Some(y) = &w.y {
                let _ = writeln!(out, "witness_y = {}", fmt_vec(y));
            }
        }
        out
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
    format!("[{}]", items.join(", "))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub samples: usize,
    /// Relative tolerance on normalized violations.
    pub tol: f64,
    pub seed: u64,
    /// Sample `i` goes to worker `i mod workers`, which draws from substream
    /// `(seed, worker)`. Reports depend on `(seed, workers)` only.
    pub workers: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, tol: DEFAULT_TOL, seed: 0, workers: 1 }
    }
}

impl CertifyOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("certificate needs at least one sample".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("tolerance must be >= 0, got {}", self.tol)));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-sample result before merging.
struct Outcome {
    upper: f64,
    lower: f64,
    ratio: Option<(f64, f64)>,
    x: Vec<f64>,
    y: Option<Vec<f64>>,
}

#[derive(Default)]
struct Merge {
    upper: Option<(f64, usize)>,
    lower: Option<(f64, usize)>,
    worst: Option<(f64, Witness)>,
    max_ratio: Option<f64>,
    min_ratio: Option<f64>,
}

impl Merge {
    fn push(&mut self, index: usize, o: Outcome) {
        fn better(cur: Option<(f64, usize)>, v: f64, i: usize) -> bool {
            match cur {
                None => true,
                Some((c, ci)) => v > c || (v == c && i < ci),
            }
        }
        // NaN counts as an unbounded violation.
        let o = Outcome { upper: nan_to_inf(o.upper), lower: nan_to_inf(o.lower), ..o };
        if better(self.upper, o.upper, index) {
            self.upper = Some((o.upper, index));
        }
        if better(self.lower, o.lower, index) {
            self.lower = Some((o.lower, index));
        }
        let (v, side) = if o.upper >= o.lower { (o.upper, Side::Upper) } else { (o.lower, Side::Lower) };
        if better(self.worst.as_ref().map(|(w, wit)| (*w, wit.index)), v, index) {
            self.worst = Some((v, Witness { x: o.x, y: o.y, side, index }));
        }
        if let Some((lo, hi)) = o.ratio {
            self.max_ratio = Some(self.max_ratio.map_or(hi, |m| m.max(hi)));
            self.min_ratio = Some(self.min_ratio.map_or(lo, |m| m.min(lo)));
        }
    }

    fn absorb(&mut self, other: Merge) {
        let pick = |a: Option<(f64, usize)>, b: Option<(f64, usize)>| match (a, b) {
            (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        };
        self.upper = pick(self.upper, other.upper);
        self.lower = pick(self.lower, other.lower);
        self.worst = match (self.worst.take(), other.worst) {
            (Some(a), Some(b)) => {
                Some(if b.0 > a.0 || (b.0 == a.0 && b.1.index < a.1.index) { b } else { a })
            }
            (a, None) => a,
            (None, b) => b,
        };
        self.max_ratio = match (self.max_ratio, other.max_ratio) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.min_ratio = match (self.min_ratio, other.min_ratio) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Runs `sample(rng, i)` for every index, partitioned across workers, and
/// merges by maximum violation (ties go to the lower index).
fn run_sampled<F>(opts: &CertifyOptions, sample: F) -> Result<Merge>
where
    F: Fn(&mut Prng, usize) -> Result<Outcome> + Sync,
{
    let worker = |w: usize| -> Result<Merge> {
        let mut rng = Prng::substream(opts.seed, w as u64);
        let mut merge = Merge::default();
        for i in (w..opts.samples).step_by(opts.workers) {
            merge.push(i, sample(&mut rng, i)?);
        }
        Ok(merge)
    };
    let parts: Vec<Result<Merge>> = if opts.workers == 1 {
        vec![worker(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..opts.workers).map(|w| s.spawn(move || worker(w))).collect();
            handles.into_iter().map(|h| h.join().expect("certificate worker panicked")).collect()
        })
    };
    let mut total = Merge::default();
    for part in parts {
        total.absorb(part?);
    }
    Ok(total)
}

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() { f64::INFINITY } else { v }
}

fn finish(condition: Condition, opts: &CertifyOptions, l: f64, mu: f64, m: Merge) -> CertificateReport {
    let worst_upper = m.upper.map_or(f64::NEG_INFINITY, |u| u.0);
    let worst_lower = m.lower.map_or(f64::NEG_INFINITY, |u| u.0);
    let (worst_violation, witness) = match m.worst {
        Some((v, w)) => (v, Some(w)),
        None => (f64::NEG_INFINITY, None),
    };
    CertificateReport {
        condition,
        samples: opts.samples,
        worst_violation,
        worst_upper,
        worst_lower,
        tolerance: opts.tol,
        pass: worst_violation <= opts.tol,
        seed: opts.seed,
        l,
        mu,
        witness,
        max_ratio: m.max_ratio,
        min_ratio: m.min_ratio,
        margin: None,
    }
}

fn check_constants<T: Scalar>(l: T, mu: T) -> Result<()> {
    if !(l.is_finite() && mu.is_finite()) || mu < T::zero() {
        return Err(Error::InvalidParameter(format!("need finite L and mu >= 0, got L = {l}, mu = {mu}")));
    }
    Ok(())
}

fn require_sample<T: Scalar>(x: &[T], i: usize, f: &dyn Objective<T>, h: &dyn Objective<T>) -> Result<()> {
    for d in [f.domain(), h.domain()] {
        if !d.is_evaluable(x) {
            return Err(Error::DomainViolation(format!("sample {i} is outside the {} domain", d.name())));
        }
    }
    Ok(())
}

fn to_f64<T: Scalar>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64_lossy()).collect()
}

/// Checks `μ⟨∇h(x)−∇h(y),x−y⟩ ≤ ⟨∇f(x)−∇f(y),x−y⟩ ≤ L⟨∇h(x)−∇h(y),x−y⟩`
/// on `opts.samples` random pairs. Each side's violation is divided by
/// `1 + |⟨∇f⟩| + L|⟨∇h⟩|` (resp. `μ`), so `tol` is relative to the inner products.
pub fn check_gradient_monotonicity<T: Scalar>(
    f: &dyn Objective<T>,
    h: &dyn Objective<T>,
    l: T,
    mu: T,
    sampler: &Sampler,
    opts: &CertifyOptions,
) -> Result<CertificateReport> {
    opts.validate()?;
    sampler.validate()?;
    check_constants(l, mu)?;
    check_dim(f.dim(), sampler.dim())?;
    check_dim(h.dim(), sampler.dim())?;
    let merged = run_sampled(opts, |rng, i| {
        let (x, y) = sampler.draw_pair(rng, i);
        require_sample(&x, i, f, h)?;
        require_sample(&y, i, f, h)?;
        let gf = gradient_gap(f, &x, &y)?;
        let gh = gradient_gap(h, &x, &y)?;
        let upper = (gf - l * gh) / (T::one() + gf.abs() + l * gh.abs());
        let lower = (mu * gh - gf) / (T::one() + gf.abs() + mu * gh.abs());
        Ok(Outcome {
            upper: upper.to_f64_lossy(),
            lower: lower.to_f64_lossy(),
            ratio: None,
            x: to_f64(&x),
            y: Some(to_f64(&y)),
        })
    })?;
    Ok(finish(Condition::GradientMonotonicity, opts, l.to_f64_lossy(), mu.to_f64_lossy(), merged))
}

/// Checks `λ_min(L∇²h − ∇²f) ≥ 0` and `λ_min(∇²f − μ∇²h) ≥ 0` at sampled
/// points, normalized by `1 + ‖∇²f‖_max + L‖∇²h‖_max` (resp. `μ`). Objectives
/// without an analytic Hessian use central differences of the gradient.
pub fn check_hessian_dominance<T: Scalar>(
    f: &dyn Objective<T>,
    h: &dyn Objective<T>,
    l: T,
    mu: T,
    sampler: &Sampler,
    opts: &CertifyOptions,
) -> Result<CertificateReport> {
    opts.validate()?;
    sampler.validate()?;
    check_constants(l, mu)?;
    check_dim(f.dim(), sampler.dim())?;
    check_dim(h.dim(), sampler.dim())?;
    let merged = run_sampled(opts, |rng, i| {
        let x = sampler.draw(rng, i);
        require_sample(&x, i, f, h)?;
        let hf = hessian_or_fd(f, &x)?;
        let hh = hessian_or_fd(h, &x)?;
        let eu = sym_eigenvalues(&hh.scaled(l).add_scaled(-T::one(), &hf))?[0];
        let el = sym_eigenvalues(&hf.add_scaled(-mu, &hh))?[0];
        let (nf, nh) = (hf.max_abs(), hh.max_abs());
        let upper = -eu / (T::one() + nf + l * nh);
        let lower = -el / (T::one() + nf + mu * nh);
        Ok(Outcome {
            upper: upper.to_f64_lossy(),
            lower: lower.to_f64_lossy(),
            ratio: relative_eigen_range(&hf, &hh)?,
            x: to_f64(&x),
            y: None,
        })
    })?;
    Ok(finish(Condition::HessianDominance, opts, l.to_f64_lossy(), mu.to_f64_lossy(), merged))
}

/// Smallest and largest eigenvalue of `∇²f` relative to `∇²h`, i.e. of
/// `R⁻¹ ∇²f R⁻ᵀ` with `∇²h = R Rᵀ`; `None` when `∇²h` is not positive definite.
fn relative_eigen_range<T: Scalar>(hf: &Matrix<T>, hh: &Matrix<T>) -> Result<Option<(f64, f64)>> {
    let chol = match Cholesky::new(hh) {
        Ok(c) => c,
        Err(Error::Singular { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let n = hf.rows();
    // X = R⁻¹ ∇²f column by column, then R⁻¹ Xᵀ.
    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        let col = chol.solve_lower(&hf.column(j));
        (0..n).for_each(|i| x[(i, j)] = col[i]);
    }
    let xt = x.transpose();
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        let col = chol.solve_lower(&xt.column(j));
        (0..n).for_each(|i| r[(i, j)] = col[i]);
    }
    let ev = sym_eigenvalues(&r)?;
    Ok(Some((ev[0].to_f64_lossy(), ev[n - 1].to_f64_lossy())))
}

/// Step for coordinate `i`, at most `base·(1+|x_i|)` and, on domains bounded
/// away from zero, at most `1e-4·|x_i|`; halved until both probes evaluate.
fn fd_step<T: Scalar>(domain: &Domain<T>, x: &[T], i: usize, base: f64) -> Result<T> {
    let mut step = T::lit(base) * (T::one() + x[i].abs());
    if !matches!(domain, Domain::AllSpace { .. }) {
        step = step.min(T::lit(1e-4) * x[i].abs()).max(T::min_positive_value());
    }
    let mut probe = x.to_vec();
    for _ in 0..FD_MAX_HALVINGS {
        probe[i] = x[i] + step;
        let ok_plus = domain.is_evaluable(&probe);
        probe[i] = x[i] - step;
        if ok_plus && domain.is_evaluable(&probe) {
            return Ok(step);
        }
        step = step * T::lit(0.5);
    }
    Err(Error::FiniteDifference(format!("no admissible step for coordinate {i}")))
}

/// Central-difference gradient of `f` at `x`.
pub fn fd_gradient<T: Scalar>(f: &dyn Objective<T>, x: &[T]) -> Result<Vec<T>> {
    check_dim(f.dim(), x.len())?;
    f.domain().require_evaluable(x)?;
    let mut out = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let step = fd_step(f.domain(), x, i, FD_GRADIENT_STEP)?;
        probe[i] = x[i] + step;
        let fp = f.value(&probe)?;
        probe[i] = x[i] - step;
        let fm = f.value(&probe)?;
        probe[i] = x[i];
        out.push((fp - fm) / (step + step));
    }
    Ok(out)
}

/// `‖fd − ∇f(x)‖ / max(‖∇f(x)‖, 1)`.
pub fn gradient_check<T: Scalar>(f: &dyn Objective<T>, x: &[T]) -> Result<T> {
    let g = f.gradient(x)?;
    let fd = fd_gradient(f, x)?;
    let diff: Vec<T> = fd.iter().zip(&g).map(|(&a, &b)| a - b).collect();
    Ok(norm2(&diff) / norm2(&g).max(T::one()))
}

/// Central differences of the gradient with step `1e-4·(1+|x_j|)`, symmetrized.
pub fn fd_hessian<T: Scalar>(f: &dyn Objective<T>, x: &[T]) -> Result<Matrix<T>> {
    check_dim(f.dim(), x.len())?;
    f.domain().require_evaluable(x)?;
    let n = x.len();
    let mut m = Matrix::zeros(n, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let step = fd_step(f.domain(), x, j, FD_HESSIAN_STEP)?;
        probe[j] = x[j] + step;
        let gp = f.gradient(&probe)?;
        probe[j] = x[j] - step;
        let gm = f.gradient(&probe)?;
        probe[j] = x[j];
        for i in 0..n {
            m[(i, j)] = (gp[i] - gm[i]) / (step + step);
        }
    }
    let scale = m.max_abs();
    if !scale.is_finite() {
        return Err(Error::FiniteDifference("non-finite Hessian entries".into()));
    }
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(T::zero(), |acc, (i, j)| acc.max((m[(i, j)] - m[(j, i)]).abs()));
    if asym > T::lit(FD_ASYMMETRY_LIMIT) * (T::one() + scale) {
        return Err(Error::FiniteDifference(format!(
            "Hessian asymmetry {asym:e} against scale {scale:e}; differences are ill-conditioned"
        )));
    }
    m.symmetrize();
    Ok(m)
}

/// Analytic Hessian when the oracle provides one, finite differences otherwise.
pub fn hessian_or_fd<T: Scalar>(f: &dyn Objective<T>, x: &[T]) -> Result<Matrix<T>> {
    match f.hessian(x) {
        Some(h) => h,
        None => fd_hessian(f, x),
    }
}

/// `D0` of a bound kind: `D_h(x*, x⁰)` for primal kinds, `h(x*) − h(x⁰)` for
/// dual kinds. Rounding-level negatives are clamped to zero.
pub fn initial_distance<T: Scalar>(h: &dyn Objective<T>, x_star: &[T], x0: &[T], kind: BoundKind) -> Result<T> {
    let d = if kind.is_dual() {
        let (hs, h0) = (h.value(x_star)?, h.value(x0)?);
        let d = hs - h0;
        if d < -T::lit(1e-12) * (T::one() + hs.abs() + h0.abs()) {
            return Err(Error::InvalidParameter(format!(
                "h(x*) - h(x0) = {d:e} < 0; x0 is not the minimizer of h"
            )));
        }
        d
    } else {
        bregman_distance(h, x_star, x0)?
    };
    Ok(d.max(T::zero()))
}

fn trace_constants<T: Scalar>(trace: &IterateTrace<T>) -> Result<(T, T, Vec<T>)> {
    let l = trace.meta.l.ok_or_else(|| Error::Config("trace metadata has no L".into()))?;
    let mu = trace.meta.mu.ok_or_else(|| Error::Config("trace metadata has no mu".into()))?;
    let x0 = trace.records.first().ok_or_else(|| Error::Config("trace has no records".into()))?.x.clone();
    Ok((T::lit(l), T::lit(mu), x0))
}

/// Checks `gap_k ≤ bound(k) + 1e-9·(1+|f*|)` on every recorded `k ≥ 1`, with
/// `gap_k = f_k − f*`, `x⁰` the first record and `L`, `μ` from the metadata.
pub fn check_bound_on_trace<T: Scalar>(
    trace: &IterateTrace<T>,
    h: &dyn Objective<T>,
    x_star: &[T],
    f_star: T,
    kind: BoundKind,
) -> Result<CertificateReport> {
    let (l, mu, x0) = trace_constants(trace)?;
    let d0 = initial_distance(h, x_star, &x0, kind)?;
    let slack = T::lit(TRACE_SLACK) * (T::one() + f_star.abs());
    let mut worst: Option<(T, usize)> = None;
    let mut checked = 0;
    for (idx, r) in trace.records.iter().enumerate().filter(|(_, r)| r.k >= 1) {
        let bound = eval_bound(&BoundQuery::new(l, mu, r.k as u64, d0, kind))?;
        let v = (r.f - f_star) - bound;
        checked += 1;
        if worst.is_none_or(|(w, _)| v > w || v.is_nan()) {
            worst = Some((v, idx));
        }
    }
    let (worst_violation, witness) = match worst {
        Some((v, idx)) => (
            v.to_f64_lossy(),
            Some(Witness { x: to_f64(&trace.records[idx].x), y: None, side: Side::Upper, index: trace.records[idx].k }),
        ),
        None => (f64::NEG_INFINITY, None),
    };
    let tol = slack.to_f64_lossy();
    Ok(CertificateReport {
        condition: Condition::TraceBound(kind),
        samples: checked,
        worst_violation,
        worst_upper: worst_violation,
        worst_lower: f64::NEG_INFINITY,
        tolerance: tol,
        pass: worst_violation <= tol,
        seed: trace.meta.seed,
        l: l.to_f64_lossy(),
        mu: mu.to_f64_lossy(),
        witness,
        max_ratio: None,
        min_ratio: None,
        margin: Some(-worst_violation),
    })
}

/// Fills the `gap` column from `f*` and `gap_bound` for every `k ≥ 1`.
pub fn attach_bounds<T: Scalar>(
    trace: &mut IterateTrace<T>,
    h: &dyn Objective<T>,
    x_star: &[T],
    f_star: T,
    kind: BoundKind,
) -> Result<()> {
    let (l, mu, x0) = trace_constants(trace)?;
    let d0 = initial_distance(h, x_star, &x0, kind)?;
    trace.set_reference_optimum(f_star);
    for r in trace.records.iter_mut().filter(|r| r.k >= 1) {
        r.gap_bound = Some(eval_bound(&BoundQuery::new(l, mu, r.k as u64, d0, kind))?);
    }
    Ok(())
}

#[cfg(test)]
mod tests;
