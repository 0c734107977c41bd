//! Dense linear-algebra primitives: thin QR, small dense SVD, rank-r
//! truncated SVD and the spectral norm.

mod qr;
mod svd;
mod truncated;

pub use qr::{thin_qr, ThinQr};
pub use svd::{svd_small, SvdResult};
pub use truncated::{
    randomized_svd, spectral_norm, svd_truncated, svd_truncated_seeded, DEFAULT_SVD_SEED,
    DENSE_SVD_CUTOFF, OVERSAMPLING, POWER_ITERATIONS,
};
