use crate::error::{Error, Result};
use crate::oracle::RelSmoothPair;
use crate::scalar::Scalar;

use crate::trace::IterateTrace;

use super::{Recorder, SolverAbort, SolverConfig};

/// Weights and accumulated model of the dual averaging scheme after `k` steps.
///
/// The model `h(x) + Σ_{i<k} a_{i+1}[f(x^i) + ⟨∇f(x^i), x − x^i⟩ + μD_h(x, x^i)]`
/// has `h`-coefficient `1 + μA_k` and linear part `Σ a_{i+1}(∇f(x^i) − μ∇h(x^i))`.
/// Only the linear part divided by `1 + μA_k` is stored; it obeys
/// `G_{k+1} = (1 − μ/L) G_k + (∇f(x^k) − μ∇h(x^k))/L`, which needs neither
/// `a_k` nor `A_k` and cannot overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct DualAveragingState<T> {
    pub k: usize,
    /// Last weight `a_k` (zero before the first step).
    pub a_last: T,
    /// `A_k` as a running sum of the weights.
    pub a_sum: T,
    /// Normalized linear coefficient `G_k`.
    pub linear: Vec<T>,
    /// `min_{1 ≤ i ≤ k} f(x^i)`.
    pub best_f: Option<T>,
    l: T,
    mu: T,
}

impl<T: Scalar> DualAveragingState<T> {
    pub fn new(l: T, mu: T, dim: usize) -> Result<Self> {
        if !(l > mu) || !(mu >= T::zero()) {
            return Err(Error::Config(format!("dual averaging needs L > mu >= 0, got L = {l}, mu = {mu}")));
        }
        Ok(Self { k: 0, a_last: T::zero(), a_sum: T::zero(), linear: vec![T::zero(); dim], best_f: None, l, mu })
    }

    /// `a_{k+1} = (1/(L−μ)) (L/(L−μ))^k`, or `1/L` when `μ = 0`.
    pub fn weight(&self, k: usize) -> T {
        if self.mu == T::zero() {
            return T::one() / self.l;
        }
        let lm = self.l - self.mu;
        (self.l / lm).powi(k as i32) / lm
    }

    /// `A_k` in closed form.
    pub fn weight_sum_closed(&self) -> T {
        let k = T::from_count(self.k);
        if self.mu == T::zero() {
            return k / self.l;
        }
        let ratio = self.mu / (self.l - self.mu);
        (k * ratio.ln_1p()).exp_m1() / self.mu
    }

    /// Relative disagreement of the running and closed-form `A_k`.
    pub fn weight_identity_error(&self) -> T {
        let closed = self.weight_sum_closed();
        if closed == T::zero() {
            return self.a_sum.abs();
        }
        ((self.a_sum - closed) / closed).abs()
    }

    /// Folds in `∇f(x^k)` and `∇h(x^k)` (the latter is ignored when `μ = 0`).
    pub fn accumulate(&mut self, grad_f: &[T], grad_h: Option<&[T]>) {
        let a = self.weight(self.k);
        self.a_last = a;
        self.a_sum = self.a_sum + a;
        let decay = T::one() - self.mu / self.l;
        let inv_l = T::one() / self.l;
        match grad_h {
            Some(gh) if self.mu > T::zero() => {
                for ((g, &gf), &hv) in self.linear.iter_mut().zip(grad_f).zip(gh) {
                    *g = decay * *g + (gf - self.mu * hv) * inv_l;
                }
            }
            _ => {
                for (g, &gf) in self.linear.iter_mut().zip(grad_f) {
                    *g = *g + gf * inv_l;
                }
            }
        }
        self.k += 1;
    }
}

/// Dual averaging from the `h`-center; the trace reports `min_{1≤i≤k} f(x^i)`
/// (and `f(x⁰)` at `k = 0`).
pub fn dual_averaging<T: Scalar>(
    pair: &RelSmoothPair<T>,
    cfg: &SolverConfig<T>,
) -> std::result::Result<IterateTrace<T>, SolverAbort<T>> {
    run_dual_averaging(pair, cfg).map(|(t, _)| t)
}

/// As [`dual_averaging`], also returning the final weight state.
pub fn run_dual_averaging<T: Scalar>(
    pair: &RelSmoothPair<T>,
    cfg: &SolverConfig<T>,
) -> std::result::Result<(IterateTrace<T>, DualAveragingState<T>), SolverAbort<T>> {
    let mut rec = Recorder::for_pair("das", cfg, pair);
    let setup = || -> Result<(DualAveragingState<T>, Vec<T>)> {
        cfg.validate()?;
        let state = DualAveragingState::new(pair.l, pair.mu, pair.dim())?;
        Ok((state, pair.reference.center()?))
    };
    let (mut state, mut x) = match setup() {
        Ok(v) => v,
        Err(e) => return Err(rec.abort(e)),
    };
    let h = pair.reference.as_ref();
    let f = pair.objective.as_ref();
    let (f0, mut g) = match f.value_grad(&x) {
        Ok(v) => v,
        Err(e) => return Err(rec.abort(e)),
    };
    if rec.observe(0, &x, f0, None, false) {
        return Ok((rec.finish(), state));
    }
    for k in 1..=cfg.max_iters {
        let step = |state: &mut DualAveragingState<T>| -> Result<(Vec<T>, T, Vec<T>, T)> {
            let gh = if pair.mu > T::zero() { Some(h.gradient(&x)?) } else { None };
            state.accumulate(&g, gh.as_deref());
            let sol = h.subproblem(&state.linear)?;
            let (fv, gv) = f.value_grad(&sol.x)?;
            if !fv.is_finite() {
                return Err(Error::NonFinite(format!("objective value at iteration {k}")));
            }
            Ok((sol.x, fv, gv, sol.residual))
        };
        let (xn, fv, gv, residual) = match step(&mut state) {
            Ok(v) => v,
            Err(e) => return Err(rec.abort(e)),
        };
        x = xn;
        g = gv;
        let best = state.best_f.map_or(fv, |b| b.min(fv));
        state.best_f = Some(best);
        if rec.observe(k, &x, best, Some(residual), k == cfg.max_iters) {
            break;
        }
    }
    Ok((rec.finish(), state))
}
