use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::rng::Prng;
use crate::scalar::Scalar;

/// Default distance kept from the simplex and box boundaries.
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Source of interior sample points.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    /// Normalized exponentials on `Δₙ`, every coordinate at least `floor`.
    Simplex { dim: usize, floor: f64 },
    /// Normalized `(−ln u_i)^power`: `power > 1` concentrates mass on a few
    /// coordinates, probing regions near low-dimensional faces.
    SimplexPowered { dim: usize, power: f64, floor: f64 },
    /// Uniform on `[floor·u, u]ⁿ`.
    Box { dim: usize, upper: f64, floor: f64 },
    /// `center + scale·N(0, I)`.
    Gaussian { center: Vec<f64>, scale: f64 },
    /// Positive orthant: `exp(N(0, scale²))` coordinatewise.
    LogNormal { dim: usize, scale: f64 },
    /// Deterministic uniform grid of `points` nodes on `[lo, hi]` (one dimension).
    Grid { lo: f64, hi: f64, points: usize },
    /// Points from `base`, each paired with a nearby point: a multiplicative
    /// perturbation `x_i·exp(radius·N)` on positive domains, additive otherwise.
    Local { base: Box<Sampler>, radius: f64 },
}

impl Sampler {
    /// A sensible sampler for the interior of `domain`.
    pub fn for_domain<T: Scalar>(domain: &Domain<T>) -> Result<Self> {
        let dim = domain.dim();
        match domain {
            Domain::AllSpace { .. } => Ok(Sampler::Gaussian { center: vec![0.0; dim], scale: 1.0 }),
            Domain::UnitSimplex { .. } => Ok(Sampler::Simplex { dim, floor: DEFAULT_FLOOR }),
            Domain::OpenBox { upper, .. } => {
                Ok(Sampler::Box { dim, upper: upper.to_f64_lossy(), floor: DEFAULT_FLOOR })
            }
            Domain::PositiveOrthant { .. } => Ok(Sampler::LogNormal { dim, scale: 1.0 }),
            Domain::Preimage { .. } => {
                Err(Error::InvalidParameter("no default sampler for a preimage domain".into()))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Sampler::Simplex { dim, .. } | Sampler::Box { dim, .. } | Sampler::LogNormal { dim, .. } => *dim,
            Sampler::SimplexPowered { dim, .. } => *dim,
            Sampler::Gaussian { center, .. } => center.len(),
            Sampler::Grid { .. } => 1,
            Sampler::Local { base, .. } => base.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Sampler::Simplex { dim, floor } => {
                if *dim < 1 || !(*floor >= 0.0) || *floor * (*dim as f64) >= 1.0 {
                    return bad(format!("simplex sampler with dim {dim} and floor {floor}"));
                }
            }
            Sampler::SimplexPowered { dim, power, floor } => {
                if *dim < 1 || !(*power > 0.0) || !power.is_finite() || !(*floor >= 0.0) || *floor * (*dim as f64) >= 1.0
                {
                    return bad(format!("powered simplex sampler with dim {dim}, power {power}, floor {floor}"));
                }
            }
            Sampler::Box { dim, upper, floor } => {
                if *dim < 1 || !(*upper > 0.0) || !upper.is_finite() || !(*floor > 0.0 && *floor < 1.0) {
                    return bad(format!("box sampler with dim {dim}, upper {upper}, floor {floor}"));
                }
            }
            Sampler::Gaussian { center, scale } => {
                if center.is_empty() || !(*scale > 0.0) || !scale.is_finite() {
                    return bad(format!("gaussian sampler with scale {scale}"));
                }
            }
            Sampler::LogNormal { dim, scale } => {
                if *dim < 1 || !(*scale > 0.0) || !scale.is_finite() {
                    return bad(format!("log-normal sampler with scale {scale}"));
                }
            }
            Sampler::Grid { lo, hi, points } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || *points < 2 {
                    return bad(format!("grid [{lo}, {hi}] with {points} points"));
                }
            }
            Sampler::Local { base, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return bad(format!("local sampler with radius {radius}"));
                }
                if matches!(**base, Sampler::Local { .. }) {
                    return bad("nested local samplers".into());
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Sample number `index`, drawing from `rng` when the sampler is random.
    pub fn draw<T: Scalar>(&self, rng: &mut Prng, index: usize) -> Vec<T> {
        match self {
            Sampler::Simplex { dim, floor } => rng.simplex_point(*dim, *floor),
            Sampler::SimplexPowered { dim, power, floor } => {
                let e: Vec<f64> = (0..*dim).map(|_| (-(1.0 - rng.uniform()).ln()).powf(*power)).collect();
                floored_simplex(e, *floor)
            }
            Sampler::Box { dim, upper, floor } => {
                (0..*dim).map(|_| T::lit(upper * rng.uniform_in(*floor, 1.0))).collect()
            }
            Sampler::Gaussian { center, scale } => {
                center.iter().map(|c| T::lit(c + scale * rng.normal())).collect()
            }
            Sampler::LogNormal { dim, scale } => (0..*dim).map(|_| T::lit((scale * rng.normal()).exp())).collect(),
            Sampler::Grid { lo, hi, points } => vec![T::lit(grid_node(*lo, *hi, *points, index % points))],
            Sampler::Local { base, .. } => base.draw(rng, index),
        }
    }

    /// Pair number `index` for pairwise checks. Grids pair each node with one
    /// a fixed stride away; local samplers perturb the first point; other
    /// samplers draw two independent points.
    pub fn draw_pair<T: Scalar>(&self, rng: &mut Prng, index: usize) -> (Vec<T>, Vec<T>) {
        match self {
            Sampler::Grid { lo, hi, points } => {
                let stride = (points / 3).max(1);
                let y = vec![T::lit(grid_node(*lo, *hi, *points, (index + stride) % points))];
                (self.draw(rng, index), y)
            }
            Sampler::Local { base, radius } => {
                let x: Vec<f64> = base.draw(rng, index);
                let y = base.perturb(&x, *radius, rng);
                (to_scalar(&x), to_scalar(&y))
            }
            _ => {
                let x = self.draw(rng, index);
                (x, self.draw(rng, index))
            }
        }
    }

    fn perturb(&self, x: &[f64], radius: f64, rng: &mut Prng) -> Vec<f64> {
        let mut scaled = || (radius * rng.normal()).exp();
        match self {
            Sampler::Simplex { floor, .. } | Sampler::SimplexPowered { floor, .. } => {
                let y: Vec<f64> = x.iter().map(|v| v * scaled()).collect();
                floored_simplex(y, *floor)
            }
            Sampler::Box { upper, floor, .. } => {
                x.iter().map(|v| (v * scaled()).clamp(floor * upper, *upper)).collect()
            }
            Sampler::LogNormal { .. } => x.iter().map(|v| v * scaled()).collect(),
            _ => x.iter().map(|v| v + radius * rng.normal()).collect(),
        }
    }
}

fn to_scalar<T: Scalar>(x: &[f64]) -> Vec<T> {
    x.iter().map(|&v| T::lit(v)).collect()
}

/// Normalizes positive weights onto the simplex, floors every coordinate and
/// renormalizes.
fn floored_simplex<T: Scalar>(mut e: Vec<f64>, floor: f64) -> Vec<T> {
    let total: f64 = e.iter().sum();
    e.iter_mut().for_each(|v| *v = (*v / total).max(floor));
    let total: f64 = e.iter().sum();
    e.iter().map(|v| T::lit(v / total)).collect()
}

fn grid_node(lo: f64, hi: f64, points: usize, i: usize) -> f64 {
    if i + 1 == points {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (points - 1) as f64
    }
}
