//! Robust principal component analysis by accelerated alternating
//! projections.
//!
//! A data matrix `D` is split into a rank-`r` part `L` and a sparse part `S`.
//! Each iteration projects the residual `D - S_k` onto the tangent space of
//! the rank-`r` manifold at a trimmed copy of `L_k`, truncates that
//! projection back to rank `r` through a `2r x 2r` SVD, and re-estimates `S`
//! by hard thresholding with a geometrically shrinking threshold.
//!
//! Modules:
//! - [`numkernel`]: QR, SVD, truncated SVD, spectral norm.
//! - [`rpca`]: trim, tangent projections, the accelerated solver, its
//!   initialization and the plain alternating-projections baseline.
//! - [`synth`]: seeded synthetic problems.
//! - [`eval`]: metrics and the phase/runtime experiment harnesses.
//! - [`io`]: matrix files, run configuration and JSON reports.

pub mod error;
pub mod eval;
pub mod io;
pub mod matrix;
pub mod numkernel;
pub mod rpca;
pub mod synth;

pub use error::{Result, RpcaError};
pub use matrix::DenseMatrix;
