use crate::linalg::Matrix;
use crate::oracle::Objective;
use crate::rng::Prng;
use crate::scalar::norm2;

/// `‖fd − ∇f‖ / max(‖∇f‖, 1)` with central differences at step `1e-5·(1+‖x‖)`.
pub fn fd_gradient_error<F: Objective<f64> + ?Sized>(f: &F, x: &[f64]) -> f64 {
    let g = f.gradient(x).unwrap();
    let step = 1e-5 * (1.0 + norm2(x));
    let fd: Vec<f64> = (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += step;
            xm[i] -= step;
            (f.value(&xp).unwrap() - f.value(&xm).unwrap()) / (2.0 * step)
        })
        .collect();
    let diff: Vec<f64> = fd.iter().zip(&g).map(|(a, b)| a - b).collect();
    norm2(&diff) / norm2(&g).max(1.0)
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
    Prng::new(seed).gaussian_matrix(rows, cols)
}
