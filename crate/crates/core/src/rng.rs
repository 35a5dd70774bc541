//! Deterministic random numbers for instance generation and sampling.
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Uniforms take the top 53 bits of
//! each output, `(u >> 11) · 2⁻⁵³`; normals use the cosine branch of
//! Box–Muller, consuming two uniforms each. Independent substreams are
//! obtained by applying the generator's 2¹²⁸-step jump `index` times.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Name recorded in trace metadata.
pub const PRNG_NAME: &str = "xoshiro256++/splitmix64-seeded";

#[derive(Debug, Clone)]
pub struct Prng {
    inner: Xoshiro256PlusPlus,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self { inner: Xoshiro256PlusPlus::seed_from_u64(seed) }
    }

    /// Stream `index` of the family rooted at `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut inner = Xoshiro256PlusPlus::seed_from_u64(seed);
        for _ in 0..index {
            inner.jump();
        }
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal_vec<T: Scalar>(&mut self, n: usize) -> Vec<T> {
        (0..n).map(|_| T::lit(self.normal())).collect()
    }

    /// `rows × cols` matrix of standard normals, filled row by row.
    pub fn gaussian_matrix<T: Scalar>(&mut self, rows: usize, cols: usize) -> Matrix<T> {
        Matrix::from_fn(rows, cols, |_, _| T::lit(self.normal()))
    }

    /// Point of the unit simplex from normalized exponentials `−ln u`, with
    /// every coordinate at least `floor` (then renormalized).
    pub fn simplex_point<T: Scalar>(&mut self, n: usize, floor: f64) -> Vec<T> {
        let mut e: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let total: f64 = e.iter().sum();
        e.iter_mut().for_each(|v| *v = (*v / total).max(floor));
        let total: f64 = e.iter().sum();
        e.iter().map(|v| T::lit(v / total)).collect()
    }
}
