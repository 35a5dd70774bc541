//! Primal gradient, dual averaging, composite primal gradient and the
//! Frank–Wolfe baseline for D-optimal design.

mod composite;
mod dual_averaging;
mod frank_wolfe;
mod primal;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::oracle::RelSmoothPair;
use crate::rng::PRNG_NAME;
use crate::scalar::Scalar;
use crate::trace::{IterateTrace, TraceMeta, TraceRecord};

pub use composite::{composite_primal_gradient, CompositePiece, L1Piece, LinearPiece, ZeroPiece};
pub use dual_averaging::{dual_averaging, run_dual_averaging, DualAveragingState};
pub use frank_wolfe::{dopt_line_search_step, frank_wolfe_dopt, frank_wolfe_dopt_oracle, FrankWolfeOracle};
pub use primal::primal_gradient;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub max_iters: usize,
    /// Record every iteration up to `dense_prefix`, then every `record_every`-th.
    pub record_every: usize,
    pub dense_prefix: usize,
    /// Stop once `f − f*` drops to this value; needs `f_star`.
    pub target_gap: Option<T>,
    /// Reference optimum used for the gap column.
    pub f_star: Option<T>,
    pub seed: u64,
    /// Fill the `wall_ns` column. Off by default so traces are reproducible.
    pub record_wall_time: bool,
}

impl<T> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            record_every: 10,
            dense_prefix: 1000,
            target_gap: None,
            f_star: None,
            seed: 0,
            record_wall_time: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_iters(max_iters: usize) -> Self {
        Self { max_iters, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if self.record_every < 1 {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        if let Some(t) = self.target_gap {
            if !(t >= T::zero()) {
                return Err(Error::Config(format!("target_gap must be nonnegative, got {t}")));
            }
        }
        Ok(())
    }

    fn records(&self, k: usize) -> bool {
        k <= self.dense_prefix || k.is_multiple_of(self.record_every)
    }
}

/// A solver failure carrying every record produced before it.
#[derive(Debug, thiserror::Error)]
#[error("{algorithm} aborted after {iterations} iterations: {source}")]
pub struct SolverAbort<T: Scalar> {
    pub algorithm: &'static str,
    pub iterations: usize,
    #[source]
    pub source: Error,
    pub trace: IterateTrace<T>,
}

pub type SolverResult<T> = std::result::Result<IterateTrace<T>, SolverAbort<T>>;

/// Shared trace bookkeeping.
pub(crate) struct Recorder<'a, T: Scalar> {
    cfg: &'a SolverConfig<T>,
    algorithm: &'static str,
    trace: IterateTrace<T>,
    start: Instant,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    pub(crate) fn new(algorithm: &'static str, cfg: &'a SolverConfig<T>, l: Option<T>, mu: Option<T>) -> Self {
        let meta = TraceMeta {
            algorithm: algorithm.to_string(),
            l: l.map(|v| v.to_f64_lossy()),
            mu: mu.map(|v| v.to_f64_lossy()),
            seed: cfg.seed,
            prng: PRNG_NAME.to_string(),
            f_star: cfg.f_star.map(|v| v.to_f64_lossy()),
            ..TraceMeta::default()
        };
        Self { cfg, algorithm, trace: IterateTrace::new(meta), start: Instant::now() }
    }

    pub(crate) fn for_pair(algorithm: &'static str, cfg: &'a SolverConfig<T>, pair: &RelSmoothPair<T>) -> Self {
        let mut r = Self::new(algorithm, cfg, Some(pair.l), Some(pair.mu));
        r.trace.meta.objective = pair.objective.name();
        r.trace.meta.reference = pair.reference.name();
        r
    }

    pub(crate) fn meta_mut(&mut self) -> &mut TraceMeta {
        &mut self.trace.meta
    }

    /// Records iteration `k` when the schedule asks for it or `last` is set.
    /// Returns true when the target gap has been reached.
    pub(crate) fn observe(&mut self, k: usize, x: &[T], f: T, residual: Option<T>, last: bool) -> bool {
        let gap = self.cfg.f_star.map(|fs| f - fs);
        let reached = matches!((gap, self.cfg.target_gap), (Some(g), Some(t)) if g <= t);
        self.trace.meta.iterations = k;
        if last || reached || self.cfg.records(k) {
            let wall_ns = self.cfg.record_wall_time.then(|| self.start.elapsed().as_nanos() as u64);
            self.trace.records.push(TraceRecord {
                k,
                x: x.to_vec(),
                f,
                gap,
                gap_bound: None,
                root_residual: residual,
                wall_ns,
            });
        }
        reached
    }

    pub(crate) fn abort(self, source: Error) -> SolverAbort<T> {
        SolverAbort { algorithm: self.algorithm, iterations: self.trace.meta.iterations, source, trace: self.trace }
    }

    pub(crate) fn finish(self) -> IterateTrace<T> {
        self.trace
    }
}
