//! Seeded synthetic low-rank plus sparse problems.
//!
//! `L = PQᵀ` with i.i.d. standard normal `P` (`m x r`) and `Q` (`n x r`).
//! The support of `S` is `⌊αmn⌋` positions drawn uniformly without
//! replacement, and its values are i.i.d. uniform on `[−cE, cE]` where `E`
//! is the mean of `|L_ij|` over all entries.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RpcaError};
use crate::eval::incoherence_of;
use crate::matrix::DenseMatrix;
use crate::numkernel::svd_truncated;

/// Identifier of the generator recorded alongside every seed.
pub const RNG_ID: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    /// Fraction of entries of `S` that are nonzero.
    pub alpha: f64,
    /// Amplitude of the sparse entries relative to the mean of `|L|`.
    pub c: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn square(n: usize, r: usize, alpha: f64, c: f64, seed: u64) -> Self {
        Self {
            m: n,
            n,
            r,
            alpha,
            c,
            seed,
        }
    }

    pub fn support_size(&self) -> usize {
        (self.alpha * (self.m * self.n) as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(RpcaError::InvalidParam("m and n must be positive".into()));
        }
        if self.r == 0 || self.r > self.m.min(self.n) {
            return Err(RpcaError::RankOutOfRange {
                rank: self.r,
                rows: self.m,
                cols: self.n,
            });
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(RpcaError::InvalidParam(format!(
                "alpha = {} must lie in [0, 1)",
                self.alpha
            )));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(RpcaError::InvalidParam(format!(
                "c = {} must be > 0",
                self.c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticProblem {
    pub d: DenseMatrix,
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    /// Row-major sorted positions of the nonzeros of `S`.
    pub support: Vec<(usize, usize)>,
    pub spec: SyntheticSpec,
    /// Incoherence of `L` computed from its SVD.
    pub mu_true: f64,
    /// `σ₁(L) / σ_r(L)`.
    pub kappa_true: f64,
    /// `σ_r(L)`, kept for rank diagnostics.
    pub sigma_r: f64,
    /// Half-width of the interval the sparse values were drawn from.
    pub amplitude: f64,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticProblem> {
    spec.validate()?;
    let (m, n, r) = (spec.m, spec.n, spec.r);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let p = DenseMatrix::from_fn(m, r, |_, _| StandardNormal.sample(&mut rng));
    let q = DenseMatrix::from_fn(n, r, |_, _| StandardNormal.sample(&mut rng));
    let l = p.matmul_t(&q);

    let mean_abs = l.as_slice().iter().map(|v| v.abs()).sum::<f64>() / (m * n) as f64;
    let amplitude = spec.c * mean_abs;

    let mut positions = index::sample(&mut rng, m * n, spec.support_size()).into_vec();
    positions.sort_unstable();
    let values = Uniform::new_inclusive(-amplitude, amplitude)
        .map_err(|e| RpcaError::InvalidParam(format!("sparse amplitude: {e}")))?;
    let mut s = DenseMatrix::zeros(m, n);
    for &pos in &positions {
        s.as_mut_slice()[pos] = values.sample(&mut rng);
    }
    let support = positions.iter().map(|&pos| (pos / n, pos % n)).collect();

    let svd = svd_truncated(&l, r)?;
    let sigma_r = svd.sigma[r - 1];
    let kappa_true = svd.sigma[0] / sigma_r;
    let mu_true = incoherence_of(&l, r)?;

    Ok(SyntheticProblem {
        d: l.add(&s),
        l,
        s,
        support,
        spec: spec.clone(),
        mu_true,
        kappa_true,
        sigma_r,
        amplitude,
    })
}
