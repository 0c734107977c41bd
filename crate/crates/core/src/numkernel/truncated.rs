use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::qr::thin_qr;
use super::svd::{svd_small, SvdResult};
use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;

/// Matrices whose smaller side is at most this go through the dense SVD.
pub const DENSE_SVD_CUTOFF: usize = 1024;
/// Extra columns sampled by the randomized range finder.
pub const OVERSAMPLING: usize = 10;
/// Power (subspace) iterations of the randomized range finder.
pub const POWER_ITERATIONS: usize = 4;
/// Seed used by [`svd_truncated`].
pub const DEFAULT_SVD_SEED: u64 = 0x0005_eed0_f5bd;

/// Leading `r` singular triplets of `a`, i.e. the factors of `H_r(a)`.
pub fn svd_truncated(a: &DenseMatrix, r: usize) -> Result<SvdResult> {
    svd_truncated_seeded(a, r, DEFAULT_SVD_SEED)
}

/// As [`svd_truncated`] with an explicit seed for the randomized path.
///
/// Small matrices get an exact dense SVD. Larger ones use a Gaussian range
/// finder with [`OVERSAMPLING`] extra columns and [`POWER_ITERATIONS`]
/// re-orthonormalized power iterations, followed by a Rayleigh–Ritz SVD of
/// the projected matrix.
pub fn svd_truncated_seeded(a: &DenseMatrix, r: usize, seed: u64) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let min_dim = m.min(n);
    if r == 0 || r > min_dim {
        return Err(RpcaError::RankOutOfRange {
            rank: r,
            rows: m,
            cols: n,
        });
    }
    if min_dim <= DENSE_SVD_CUTOFF || 2 * (r + OVERSAMPLING) >= min_dim {
        return Ok(svd_small(a)?.truncate(r));
    }
    randomized_svd(a, r, seed)
}

/// Randomized subspace iteration for the leading `r` triplets, regardless
/// of the matrix size. Needs `r + OVERSAMPLING <= min(rows, cols)`.
pub fn randomized_svd(a: &DenseMatrix, r: usize, seed: u64) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let block = r + OVERSAMPLING;
    if r == 0 || block > m.min(n) {
        return Err(RpcaError::RankOutOfRange {
            rank: r,
            rows: m,
            cols: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DenseMatrix::from_fn(n, block, |_, _| StandardNormal.sample(&mut rng));
    let mut basis = thin_qr(&a.matmul(&omega))?.q;
    for _ in 0..POWER_ITERATIONS {
        let back = thin_qr(&a.t_matmul(&basis))?.q;
        basis = thin_qr(&a.matmul(&back))?.q;
    }
    // a ≈ Q (Qᵀ a); the SVD of the small factor gives the triplets.
    let projected = basis.t_matmul(a);
    let small = svd_small(&projected)?;
    let u = basis.matmul(&small.u);
    Ok(SvdResult {
        u,
        sigma: small.sigma,
        v: small.v,
    }
    .truncate(r))
}

/// `σ₁(a)`.
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    if a.is_empty() {
        return Err(RpcaError::EmptyMatrix);
    }
    if a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    Ok(svd_truncated(a, 1)?.sigma[0])
}
