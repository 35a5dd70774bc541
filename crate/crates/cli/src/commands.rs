use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, Context};
use relsmooth::certify::{
    attach_bounds, check_gradient_monotonicity, check_hessian_dominance, dopt_iteration_bound, BoundKind,
    CertificateReport, CertifyOptions, Sampler,
};
use relsmooth::objectives::DOptimalDesign;
use relsmooth::oracle::{Objective, RelSmoothPair};
use relsmooth::refs::LogBarrierSimplexRef;
use relsmooth::rng::{Prng, PRNG_NAME};
use relsmooth::solvers::{
    composite_primal_gradient, dual_averaging, frank_wolfe_dopt, frank_wolfe_dopt_oracle, primal_gradient,
    SolverAbort, SolverConfig,
};
use relsmooth::trace::IterateTrace;
use serde_json::{json, Value};

use crate::io::{write_atomic, write_trace};
use crate::spec::{Kind, Problem, ProblemSpec};

/// Command failure, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input (exit 2).
    Input(anyhow::Error),
    /// A solver or oracle run failed (exit 3).
    Solver(anyhow::Error),
    /// A certificate or verified bound failed (exit 4).
    Certificate(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Certificate(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Solver(e) => write!(f, "solver failure: {e:#}"),
            Failure::Certificate(msg) => write!(f, "certificate failure: {msg}"),
        }
    }
}

pub type CmdResult = Result<Vec<String>, Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Pgs,
    Das,
    Cpgs,
    Fw,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Pgs => "pgs",
            Algo::Das => "das",
            Algo::Cpgs => "cpgs",
            Algo::Fw => "fw",
        }
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pgs" => Ok(Algo::Pgs),
            "das" => Ok(Algo::Das),
            "cpgs" => Ok(Algo::Cpgs),
            "fw" => Ok(Algo::Fw),
            _ => Err(format!("unknown algorithm {s:?} (expected pgs, das, cpgs or fw)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub spec: PathBuf,
    pub algo: Algo,
    pub iters: usize,
    pub out: PathBuf,
    pub wall_time: bool,
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    let spec = ProblemSpec::load(path).map_err(input)?;
    spec.resolve().with_context(|| format!("resolving {}", path.display())).map_err(input)
}

fn dense_config(iters: usize, seed: u64, wall_time: bool) -> SolverConfig<f64> {
    SolverConfig {
        max_iters: iters,
        record_every: 1,
        dense_prefix: iters,
        seed,
        record_wall_time: wall_time,
        ..SolverConfig::default()
    }
}

pub fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let problem = load_problem(&args.spec)?;
    if args.iters == 0 {
        return Err(input(anyhow!("--iters must be at least 1")));
    }
    if args.algo == Algo::Fw && problem.design.is_none() {
        return Err(input(anyhow!("algorithm fw requires a dopt spec, got {}", problem.kind.as_str())));
    }
    let cfg = dense_config(args.iters, problem.seed, args.wall_time);
    let start = Instant::now();
    let result = match args.algo {
        Algo::Pgs => primal_gradient(&problem.pair, &problem.x0, &cfg),
        Algo::Das => dual_averaging(&problem.pair, &cfg),
        Algo::Cpgs => composite_primal_gradient(&problem.pair, problem.composite_piece().as_ref(), &problem.x0, &cfg),
        Algo::Fw => frank_wolfe_dopt(problem.design.as_deref().expect("checked above"), &problem.x0, &cfg),
    };
    let wall = start.elapsed();
    let extra = json!({ "spec": args.spec.display().to_string(), "kind": problem.kind.as_str() });
    match result {
        Ok(trace) => {
            write_trace(&args.out, &trace, extra).map_err(input)?;
            let last = trace.last().expect("solver traces start with k = 0");
            Ok(vec![format!(
                "{}: final f = {:.16e}, iterations = {}, wall time = {:.3} ms",
                args.algo.as_str(),
                last.f,
                trace.meta.iterations,
                wall.as_secs_f64() * 1e3
            )])
        }
        Err(abort) => {
            let flushed = write_trace(&args.out, &abort.trace, extra);
            let mut err = anyhow!("{abort}");
            if let Err(w) = flushed {
                err = err.context(format!("partial trace not written: {w:#}"));
            }
            Err(Failure::Solver(err))
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyArgs {
    pub spec: PathBuf,
    pub samples: usize,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

/// Pairs drawn close together, concentrated near low-dimensional faces on
/// the simplex. `None` for deterministic grids.
fn local_sampler(base: &Sampler) -> Option<Sampler> {
    let concentrated = match base {
        Sampler::Grid { .. } | Sampler::Local { .. } => return None,
        Sampler::Simplex { dim, floor } => Sampler::SimplexPowered { dim: *dim, power: 4.0, floor: *floor },
        other => other.clone(),
    };
    Some(Sampler::Local { base: Box::new(concentrated), radius: 0.05 })
}

fn sampler_name(s: &Sampler) -> String {
    match s {
        Sampler::Simplex { .. } => "simplex".into(),
        Sampler::SimplexPowered { power, .. } => format!("simplex-powered({power})"),
        Sampler::Box { .. } => "box".into(),
        Sampler::Gaussian { scale, .. } => format!("gaussian({scale})"),
        Sampler::LogNormal { .. } => "log-normal".into(),
        Sampler::Grid { lo, hi, points } => format!("grid[{lo}, {hi}; {points}]"),
        Sampler::Local { base, radius } => format!("local({}, {radius})", sampler_name(base)),
    }
}

pub fn report_json(r: &CertificateReport, sampler: &str) -> Value {
    json!({
        "label": r.label(),
        "condition": r.condition.to_string(),
        "sampler": sampler,
        "pass": r.pass,
        "samples": r.samples,
        "seed": r.seed,
        "L": r.l,
        "mu": r.mu,
        "tolerance": r.tolerance,
        "worst_violation": finite_or_null(r.worst_violation),
        "worst_upper": finite_or_null(r.worst_upper),
        "worst_lower": finite_or_null(r.worst_lower),
        "max_ratio": r.max_ratio,
        "min_ratio": r.min_ratio,
        "margin": r.margin,
        "witness": r.witness.as_ref().map(|w| json!({
            "index": w.index,
            "side": format!("{:?}", w.side).to_lowercase(),
            "x": w.x,
            "y": w.y,
        })),
    })
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn cmd_certify(args: &CertifyArgs) -> CmdResult {
    let problem = load_problem(&args.spec)?;
    if args.samples == 0 {
        return Err(input(anyhow!("--samples must be at least 1")));
    }
    let seed = args.seed.unwrap_or(problem.seed);
    let opts = CertifyOptions::new(args.samples, seed);
    let pair = &problem.pair;
    let (f, h) = (pair.objective.as_ref(), pair.reference.as_ref());
    let solver_err = |e: relsmooth::Error| Failure::Solver(anyhow!(e).context("certificate evaluation"));

    let mut runs: Vec<(CertificateReport, String)> = Vec::new();
    let mut samplers = vec![problem.sampler.clone()];
    samplers.extend(local_sampler(&problem.sampler));
    for s in &samplers {
        let r = check_gradient_monotonicity(f, h, pair.l, pair.mu, s, &opts).map_err(solver_err)?;
        runs.push((r, sampler_name(s)));
    }
    let has_hessians = f.hessian(&problem.x0).is_some() && h.hessian(&problem.x0).is_some();
    if has_hessians {
        let r = check_hessian_dominance(f, h, pair.l, pair.mu, &problem.sampler, &opts).map_err(solver_err)?;
        runs.push((r, sampler_name(&problem.sampler)));
    }

    let pass = runs.iter().all(|(r, _)| r.pass);
    let report = json!({
        "label": "sampled certificate",
        "spec": args.spec.display().to_string(),
        "kind": problem.kind.as_str(),
        "objective": f.name(),
        "reference": h.name(),
        "prng": PRNG_NAME,
        "pass": pass,
        "certificates": runs.iter().map(|(r, s)| report_json(r, s)).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&report).map_err(input)? + "\n";
    write_atomic(&args.out, text.as_bytes()).map_err(input)?;

    let lines: Vec<String> = runs
        .iter()
        .map(|(r, s)| {
            format!(
                "{} [{s}]: {} ({}), samples = {}, worst violation = {:.6e}",
                r.condition,
                if r.pass { "pass" } else { "FAIL" },
                r.label(),
                r.samples,
                r.worst_violation
            )
        })
        .collect();
    if pass {
        Ok(lines)
    } else {
        let worst = runs.iter().filter(|(r, _)| !r.pass).map(|(r, _)| r.worst_violation).fold(f64::NEG_INFINITY, f64::max);
        Err(Failure::Certificate(format!("{}\nworst violation = {worst:.6e}", lines.join("\n"))))
    }
}

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub m: usize,
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
    pub out: PathBuf,
    /// Iteration budget; defaults to the predicted iteration bound.
    pub iters: Option<usize>,
    /// A dopt spec to use instead of a random instance.
    pub spec: Option<PathBuf>,
}

/// Iterations run when the predicted bound does not apply and no budget is given.
const FALLBACK_ITERS: usize = 1000;
const ORACLE_MAX_ITERS: usize = 20_000_000;
/// The oracle is never looser than this, so large `eps` still gets a usable `f*`.
const ORACLE_MAX_TOL: f64 = 1e-4;

struct SolverRun {
    algo: Algo,
    trace: IterateTrace<f64>,
    wall_ns: u128,
}

/// The random design: `m × n` standard normals drawn row by row from the seed.
pub fn bench_design(m: usize, n: usize, seed: u64) -> relsmooth::linalg::Matrix<f64> {
    Prng::new(seed).gaussian_matrix(m, n)
}

pub fn cmd_bench_dopt(args: &BenchArgs) -> CmdResult {
    if !(args.eps.is_finite() && args.eps > 0.0) {
        return Err(input(anyhow!("--eps must be positive, got {}", args.eps)));
    }
    let (design, seed) = match &args.spec {
        Some(p) => {
            let problem = load_problem(p)?;
            if problem.kind != Kind::Dopt {
                return Err(input(anyhow!("bench-dopt needs a dopt spec, got {}", problem.kind.as_str())));
            }
            let d = problem.design.expect("dopt specs carry a design");
            ((*d).clone(), problem.seed)
        }
        None => {
            if args.n < args.m + 1 {
                return Err(input(anyhow!("need n >= m + 1, got m = {}, n = {}", args.m, args.n)));
            }
            let h = bench_design(args.m, args.n, args.seed);
            (DOptimalDesign::new(h).context("random design").map_err(input)?, args.seed)
        }
    };
    let (m, n) = (design.m(), design.n());
    let x0 = vec![1.0 / n as f64; n];

    let oracle_tol = (args.eps / 100.0).min(ORACLE_MAX_TOL);
    let oracle = frank_wolfe_dopt_oracle(&design, &x0, oracle_tol, ORACLE_MAX_ITERS)
        .map_err(|e| Failure::Solver(anyhow!(e).context("Frank-Wolfe oracle run")))?;
    let f_star = oracle.f;
    let interior = oracle.x.iter().all(|&v| v > 0.0);
    let f_lower = oracle.lower_bound();
    let f0 = design.value(&x0).map_err(|e| Failure::Solver(e.into()))?;
    // Conservative in both directions: the smaller gap gives the smaller k,
    // and the certified gaps below are measured from the lower bound.
    let gap0 = f0 - f_star;
    let initial_bound = m as f64 * (n as f64 / m as f64).ln();
    let initial_gap_ok = f0 - f_lower <= initial_bound;
    let predicted_k = if args.eps <= gap0 {
        Some(dopt_iteration_bound(n, gap0, args.eps).map_err(|e| Failure::Solver(e.into()))? as usize)
    } else {
        None
    };
    let budget = args.iters.unwrap_or(0).max(predicted_k.unwrap_or(FALLBACK_ITERS)).max(1);

    let design_arc = std::sync::Arc::new(design);
    let reference = std::sync::Arc::new(LogBarrierSimplexRef::new(n).map_err(|e| Failure::Solver(e.into()))?);
    let pair = RelSmoothPair::new(design_arc.clone(), reference.clone(), 1.0, 0.0).map_err(|e| Failure::Solver(e.into()))?;
    let cfg = SolverConfig { f_star: Some(f_star), ..dense_config(budget, seed, false) };

    let run = |algo: Algo| -> Result<SolverRun, SolverAbort<f64>> {
        let start = Instant::now();
        let trace = match algo {
            Algo::Pgs => primal_gradient(&pair, &x0, &cfg)?,
            Algo::Das => dual_averaging(&pair, &cfg)?,
            _ => frank_wolfe_dopt(&design_arc, &x0, &cfg)?,
        };
        Ok(SolverRun { algo, trace, wall_ns: start.elapsed().as_nanos() })
    };
    let results: Vec<Result<SolverRun, SolverAbort<f64>>> = std::thread::scope(|s| {
        let handles: Vec<_> = [Algo::Pgs, Algo::Das, Algo::Fw].map(|a| s.spawn(move || run(a))).into_iter().collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(input)?;
    let mut runs = Vec::new();
    for r in results {
        match r {
            Ok(run) => runs.push(run),
            Err(abort) => {
                let path = args.out.join(format!("trace_{}.csv", abort.algorithm));
                let _ = write_trace(&path, &abort.trace, json!({ "partial": true }));
                return Err(Failure::Solver(anyhow!("{abort}")));
            }
        }
    }

    let mut solver_reports = Vec::new();
    let mut lines = Vec::new();
    let mut iteration_bound_check = Value::Null;
    let mut iteration_bound_ok = true;
    for run in &mut runs {
        let bound_kind = match run.algo {
            Algo::Pgs => Some(BoundKind::PrimalSublinear),
            Algo::Das => Some(BoundKind::DualSublinear),
            _ => None,
        };
        run.trace.set_reference_optimum(f_star);
        // An optimum on the simplex boundary has infinite Bregman distance
        // from x0, so the bound is vacuous and the column stays empty.
        let mut bound_attached = false;
        if let (Some(kind), true) = (bound_kind, interior) {
            attach_bounds(&mut run.trace, reference.as_ref(), &oracle.x, f_star, kind)
                .map_err(|e| Failure::Solver(anyhow!(e).context("attaching bounds")))?;
            bound_attached = true;
        }
        let reached = run.trace.records.iter().find(|r| r.f - f_star <= args.eps).map(|r| r.k);
        let last = run.trace.last().expect("nonempty trace");
        if run.algo == Algo::Pgs {
            if let Some(k) = predicted_k {
                let rec = run.trace.records.iter().find(|r| r.k == k).expect("dense trace holds k");
                let certified_gap = rec.f - f_lower;
                let pass = certified_gap <= args.eps;
                iteration_bound_ok &= pass;
                iteration_bound_check = json!({
                    "k": k,
                    "f_at_k": rec.f,
                    "gap_at_k": rec.f - f_star,
                    "certified_gap_at_k": certified_gap,
                    "pass": pass,
                });
            } else {
                iteration_bound_check = json!({ "applicable": false, "k": 0, "pass": true,
                    "note": "eps exceeds f(x0) - f*, satisfied at k = 0" });
            }
        }
        lines.push(format!(
            "{}: iterations = {}, reached eps at {}, final gap = {:.6e}, wall time = {:.3} ms",
            run.algo.as_str(),
            run.trace.meta.iterations,
            reached.map_or("never".to_string(), |k| format!("k = {k}")),
            last.f - f_star,
            run.wall_ns as f64 / 1e6
        ));
        solver_reports.push(json!({
            "algorithm": run.algo.as_str(),
            "iterations_run": run.trace.meta.iterations,
            "iterations_to_eps": reached,
            "final_f": last.f,
            "final_gap": last.f - f_star,
            "gap_bound": bound_attached,
            "wall_ns": run.wall_ns as u64,
        }));
        let path = args.out.join(format!("trace_{}.csv", run.algo.as_str()));
        write_trace(&path, &run.trace, json!({ "eps": args.eps, "m": m, "n": n })).map_err(input)?;
    }
    lines.insert(
        0,
        format!(
            "oracle: f* = {f_star:.16e} (gap estimate {:.3e}, {} iterations); f(x0) - f* = {gap0:.6e} <= m ln(n/m) = {initial_bound:.6e}: {initial_gap_ok}",
            oracle.gap_estimate, oracle.iterations
        ),
    );
    lines.insert(
        1,
        match predicted_k {
            Some(k) => format!("predicted k = {k}"),
            None => "predicted k = 0 (eps exceeds the initial gap)".to_string(),
        },
    );

    let report = json!({
        "m": m,
        "n": n,
        "eps": args.eps,
        "seed": seed,
        "prng": PRNG_NAME,
        "x0": "e/n",
        "oracle": {
            "algorithm": "fw",
            "f_star": f_star,
            "gap_estimate": oracle.gap_estimate,
            "lower_bound": f_lower,
            "iterations": oracle.iterations,
            "tolerance": oracle_tol,
        },
        "f0": f0,
        "initial_gap": gap0,
        "initial_gap_bound": initial_bound,
        "initial_gap_ok": initial_gap_ok,
        "predicted_k": predicted_k.unwrap_or(0),
        "iteration_budget": budget,
        "iteration_bound_check": iteration_bound_check,
        "solvers": solver_reports,
    });
    let text = serde_json::to_string_pretty(&report).map_err(input)? + "\n";
    write_atomic(&args.out.join("report.json"), text.as_bytes()).map_err(input)?;

    if initial_gap_ok && iteration_bound_ok {
        Ok(lines)
    } else {
        Err(Failure::Certificate(format!("{}\nbench verification failed", lines.join("\n"))))
    }
}
