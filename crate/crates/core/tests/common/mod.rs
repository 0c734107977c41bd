#![allow(dead_code)]

use accaltproj::numkernel::thin_qr;
use accaltproj::rpca::FactoredLowRank;
use accaltproj::DenseMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn symmetric(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let g = gaussian(n, n, rng);
    g.add(&g.transpose()).scale(0.5)
}

/// Orthonormal factors with singular values `r, r-1, ..., 1`.
pub fn random_factored(m: usize, n: usize, r: usize, rng: &mut ChaCha8Rng) -> FactoredLowRank {
    let u = thin_qr(&gaussian(m, r, rng)).unwrap().q;
    let v = thin_qr(&gaussian(n, r, rng)).unwrap().q;
    FactoredLowRank::new(u, (0..r).map(|i| (r - i) as f64).collect(), v).unwrap()
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let scale = b.fro_norm();
    let diff = a.sub(b).fro_norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Largest singular value by power iteration on `AᵀA`, with its right
/// singular vector. Independent of the library's factorizations.
pub fn power_top(a: &DenseMatrix, iters: usize) -> (f64, Vec<f64>) {
    let n = a.cols();
    let mut x = vec![1.0; n];
    let mut sigma = 0.0;
    for _ in 0..iters {
        let ax = a.matmul(&DenseMatrix::column_vector(&x));
        let y = a.t_matmul(&ax).into_vec();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.iter().map(|v| v / norm).collect();
        sigma = ax.fro_norm();
    }
    let ax = a.matmul(&DenseMatrix::column_vector(&x));
    sigma = sigma.max(ax.fro_norm());
    (sigma, x)
}
