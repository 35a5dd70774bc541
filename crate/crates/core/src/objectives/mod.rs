//! Built-in relatively smooth objectives and the formulas that certify them.

mod dopt;
mod poly;
mod quadratic;
mod quartic;
mod volumetric;

pub use dopt::{dopt_value_grad, DOptimalDesign};
pub use poly::{l_from_polynomial_box, l_from_polynomial_rn, PolynomialBound, UnivariatePolynomial};
pub use quadratic::{LinearTilt, Quadratic};
pub use quartic::{mu_for_quartic_strong, operator_norm, quartic_value_grad, PolyQuartic};
pub use volumetric::{volumetric_value_grad, VolumetricObjective};
