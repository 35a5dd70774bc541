//! Reference functions with efficiently solvable linearized subproblems.
//!
//! | family | domain | subproblem |
//! |---|---|---|
//! | [`PowerNormRef`] | `Rⁿ` | `x = x^c − θc`, θ from a polynomial root |
//! | [`LogBarrierSimplexRef`] | `Δₙ` | `x_j = 1/(c_j + θ)`, θ from a monotone root |
//! | [`BoxPowerRef`] | `(0, u]ⁿ` | clamped square roots, θ from a monotone root |
//! | [`SquaredEuclideanRef`] | `Rⁿ` | `x = −c` |
//!
//! [`radial_dual_subproblem`] handles `h(x) = g(‖x‖²)` over sets with an
//! easy Euclidean projection by maximizing a concave 1-D dual.

mod box_power;
mod euclidean;
mod log_barrier;
mod power_norm;
mod radial;

pub use box_power::{box_power_subproblem, BoxPowerRef};
pub use euclidean::SquaredEuclideanRef;
pub use log_barrier::{simplex_logbarrier_subproblem, LogBarrierSimplexRef};
pub use power_norm::{
    power_norm_root_residual, power_norm_stationarity_residual, power_norm_subproblem, power_norm_theta,
    power_norm_theta_rootfind, power_norm_value_grad, PowerNormRef,
};
pub use radial::{radial_dual_subproblem, RadialSolution};
