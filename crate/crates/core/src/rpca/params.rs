use serde::{Deserialize, Serialize};

use crate::error::{Result, RpcaError};

/// Sparsity level at and above which the recommended decay rate switches
/// from 0.5 to 0.65.
pub const HIGH_SPARSITY_ALPHA: f64 = 0.55;

/// Tuning knobs shared by both solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RpcaParams {
    /// Target rank.
    pub r: usize,
    /// Incoherence level used by trim.
    pub mu: f64,
    /// Thresholding parameter of the main loop.
    pub beta: f64,
    /// Thresholding parameter of the initialization.
    pub beta_init: f64,
    /// Decay rate of the threshold schedule. The local convergence theory
    /// covers `(1/√12, 1)`; the experimental default 0.5 is inside it.
    pub gamma: f64,
    /// Stop once `‖D − L − S‖_F / ‖D‖_F < epsilon`.
    pub epsilon: f64,
    pub max_iter: usize,
    pub trim_enabled: bool,
}

impl RpcaParams {
    /// Recommended parameters for an `m x n` problem of rank `r` whose
    /// low-rank part has (estimated) incoherence `mu_estimate`.
    ///
    /// The estimate is inflated by 10%: trim uses `1.1 μ`, and
    /// `beta = 1.1 μ r / (2√(mn))`, `beta_init = 1.1 μ r / √(mn)`.
    pub fn recommended(r: usize, mu_estimate: f64, m: usize, n: usize) -> Self {
        let mu = 1.1 * mu_estimate;
        let sqrt_mn = ((m * n) as f64).sqrt();
        Self {
            r,
            mu,
            beta: mu * r as f64 / (2.0 * sqrt_mn),
            beta_init: mu * r as f64 / sqrt_mn,
            gamma: 0.5,
            epsilon: 1e-6,
            max_iter: 100,
            trim_enabled: true,
        }
    }

    /// Uses `gamma = 0.65` when the caller declares `alpha >= 0.55`,
    /// `0.5` otherwise. The sparsity is never estimated from data.
    pub fn with_declared_sparsity(mut self, alpha: f64) -> Self {
        self.gamma = recommended_gamma(alpha);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_trim(mut self, enabled: bool) -> Self {
        self.trim_enabled = enabled;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Checks the invariants against an `m x n` data matrix.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.r == 0 || self.r > m.min(n) {
            return Err(RpcaError::RankOutOfRange {
                rank: self.r,
                rows: m,
                cols: n,
            });
        }
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !(self.mu.is_finite() && self.mu >= 1.0) {
            return Err(RpcaError::InvalidParam(format!(
                "mu = {} must be >= 1",
                self.mu
            )));
        }
        if !finite_pos(self.beta) {
            return Err(RpcaError::InvalidParam(format!(
                "beta = {} must be > 0",
                self.beta
            )));
        }
        if !finite_pos(self.beta_init) {
            return Err(RpcaError::InvalidParam(format!(
                "beta_init = {} must be > 0",
                self.beta_init
            )));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(RpcaError::InvalidParam(format!(
                "gamma = {} must lie in [0, 1)",
                self.gamma
            )));
        }
        if !finite_pos(self.epsilon) {
            return Err(RpcaError::InvalidParam(format!(
                "epsilon = {} must be > 0",
                self.epsilon
            )));
        }
        Ok(())
    }
}

pub fn recommended_gamma(alpha: f64) -> f64 {
    if alpha >= HIGH_SPARSITY_ALPHA {
        0.65
    } else {
        0.5
    }
}
