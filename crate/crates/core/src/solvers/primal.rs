use crate::oracle::RelSmoothPair;
use crate::scalar::Scalar;

use super::composite::{pgs_scheme, ZeroPiece};
use super::{SolverConfig, SolverResult};

/// Primal gradient scheme: `x^{i+1} = argmin ⟨∇f(x^i), x⟩ + L·D_h(x, x^i)`,
/// one reference subproblem per iteration with `c = ∇f(x^i)/L − ∇h(x^i)`.
pub fn primal_gradient<T: Scalar>(pair: &RelSmoothPair<T>, x0: &[T], cfg: &SolverConfig<T>) -> SolverResult<T> {
    pgs_scheme("pgs", pair, &ZeroPiece, x0, cfg)
}
