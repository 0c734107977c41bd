use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::tangent::structured_truncate;
use super::threshold::{hard_threshold, hard_threshold_with_residual, threshold_value};
use super::trim::trim;
use super::{FactoredLowRank, RpcaParams};
use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;
use crate::numkernel::{spectral_norm, svd_truncated};

/// Current `(L_k, S_k)` pair plus what the last update produced.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub low_rank: FactoredLowRank,
    /// Dense storage; `support` counts its nonzeros.
    pub sparse: DenseMatrix,
    pub k: usize,
    /// Threshold used to produce `sparse`.
    pub zeta: f64,
    /// Singular values the threshold was computed from, descending.
    pub sigma_window: Vec<f64>,
    pub support: usize,
    /// `‖D − L_k − S_k‖_F`.
    pub residual_fro: f64,
}

/// Output of the two-step initialization together with its first stage.
#[derive(Debug, Clone)]
pub struct Initialization {
    pub state: IterationState,
    /// `σ₁(D)`.
    pub sigma1_d: f64,
    /// `ζ₋₁ = β_init σ₁(D)`.
    pub zeta_pre: f64,
    /// `S₋₁ = T_{ζ₋₁}(D)`.
    pub pre_sparse: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `‖D − L_k − S_k‖_F / ‖D‖_F`.
    pub err: f64,
    pub zeta: f64,
    pub sigma_r: f64,
    pub sigma_r_plus_1: f64,
    pub sigma_window: Vec<f64>,
    pub residual_fro: f64,
    pub support: usize,
    /// Wall time of the whole iteration.
    pub secs: f64,
    /// Wall time of the low-rank update alone (trim included).
    pub l_update_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitRecord {
    pub sigma1_d: f64,
    pub zeta_pre: f64,
    pub pre_support: usize,
}

/// Per-iteration history. Record 0 is the initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub d_fro: f64,
    pub init: InitRecord,
    pub records: Vec<IterationRecord>,
}

impl ConvergenceTrace {
    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.err).collect()
    }

    pub fn final_err(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.err)
    }

    /// Number of solver iterations after initialization.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone)]
pub struct RpcaSolution {
    pub low_rank: FactoredLowRank,
    pub sparse: DenseMatrix,
    pub trace: ConvergenceTrace,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Tangent-space accelerated alternating projections.
    AccAltProj,
    /// Full truncated SVD of `D − S_k` every iteration.
    AltProj,
}

impl SolverKind {
    pub fn id(self) -> &'static str {
        match self {
            SolverKind::AccAltProj => "accaltproj",
            SolverKind::AltProj => "altproj",
        }
    }
}

fn relative(residual: f64, d_fro: f64) -> f64 {
    if d_fro > 0.0 {
        residual / d_fro
    } else if residual == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn check_inputs(d: &DenseMatrix, params: &RpcaParams) -> Result<()> {
    if let Some(pos) = d.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(RpcaError::NonFinite {
            row: pos / d.cols(),
            col: pos % d.cols(),
        });
    }
    params.validate(d.rows(), d.cols())
}

/// Two steps of plain alternating projections with thresholds
/// `ζ₋₁ = β_init σ₁(D)` and `ζ₀ = β σ₁(D − S₋₁)`.
pub fn initialize(d: &DenseMatrix, params: &RpcaParams) -> Result<IterationState> {
    Ok(initialize_detailed(d, params)?.state)
}

pub fn initialize_detailed(d: &DenseMatrix, params: &RpcaParams) -> Result<Initialization> {
    check_inputs(d, params)?;
    let sigma1_d = spectral_norm(d)?;
    let zeta_pre = params.beta_init * sigma1_d;
    let pre_sparse = hard_threshold(d, zeta_pre);
    let svd = svd_truncated(&d.sub(&pre_sparse), params.r)?;
    // σ₁(D − S₋₁) comes out of the same factorization as L₀.
    let zeta = params.beta * svd.sigma[0];
    let sigma_window = svd.sigma.clone();
    let low_rank = FactoredLowRank::from(svd);
    let (sparse, residual_fro, support) =
        hard_threshold_with_residual(&d.sub(&low_rank.to_dense()), zeta);
    Ok(Initialization {
        state: IterationState {
            low_rank,
            sparse,
            k: 0,
            zeta,
            sigma_window,
            support,
            residual_fro,
        },
        sigma1_d,
        zeta_pre,
        pre_sparse,
    })
}

/// One accelerated iteration: trim, structured rank-`r` truncation of the
/// tangent projection of `D − S_k`, threshold update, hard thresholding.
pub fn accaltproj_step(
    state: &IterationState,
    d: &DenseMatrix,
    params: &RpcaParams,
) -> Result<IterationState> {
    Ok(accaltproj_step_timed(state, d, params)?.0)
}

fn accaltproj_step_timed(
    state: &IterationState,
    d: &DenseMatrix,
    params: &RpcaParams,
) -> Result<(IterationState, f64)> {
    let start = Instant::now();
    let basis = if params.trim_enabled {
        trim(&state.low_rank, params.mu)?
    } else {
        state.low_rank.clone()
    };
    let w = d.try_sub(&state.sparse)?;
    let (low_rank, sigma_window) = structured_truncate(&basis, &w, params.r)?;
    let l_update_secs = start.elapsed().as_secs_f64();
    Ok((
        sparse_update(low_rank, sigma_window, state.k, d, params),
        l_update_secs,
    ))
}

/// One plain alternating-projections iteration: `L = H_r(D − S_k)`, then the
/// same threshold schedule on the singular values of `D − S_k`.
pub fn altproj_step(
    state: &IterationState,
    d: &DenseMatrix,
    params: &RpcaParams,
) -> Result<IterationState> {
    Ok(altproj_step_timed(state, d, params)?.0)
}

fn altproj_step_timed(
    state: &IterationState,
    d: &DenseMatrix,
    params: &RpcaParams,
) -> Result<(IterationState, f64)> {
    let start = Instant::now();
    let w = d.try_sub(&state.sparse)?;
    let width = (params.r + 1).min(d.rows().min(d.cols()));
    let svd = svd_truncated(&w, width)?;
    let sigma_window = svd.sigma.clone();
    let low_rank = FactoredLowRank::from(svd.truncate(params.r));
    let l_update_secs = start.elapsed().as_secs_f64();
    Ok((
        sparse_update(low_rank, sigma_window, state.k, d, params),
        l_update_secs,
    ))
}

/// Runs one iteration of `kind` and returns the new state with the wall time
/// of its low-rank update.
pub fn timed_step(
    kind: SolverKind,
    state: &IterationState,
    d: &DenseMatrix,
    params: &RpcaParams,
) -> Result<(IterationState, f64)> {
    match kind {
        SolverKind::AccAltProj => accaltproj_step_timed(state, d, params),
        SolverKind::AltProj => altproj_step_timed(state, d, params),
    }
}

fn sparse_update(
    low_rank: FactoredLowRank,
    sigma_window: Vec<f64>,
    k: usize,
    d: &DenseMatrix,
    params: &RpcaParams,
) -> IterationState {
    let zeta = threshold_value(&sigma_window, params.r, params.beta, params.gamma, k);
    let (sparse, residual_fro, support) =
        hard_threshold_with_residual(&d.sub(&low_rank.to_dense()), zeta);
    IterationState {
        low_rank,
        sparse,
        k: k + 1,
        zeta,
        sigma_window,
        support,
        residual_fro,
    }
}

fn record(
    state: &IterationState,
    r: usize,
    d_fro: f64,
    secs: f64,
    l_update_secs: f64,
) -> IterationRecord {
    IterationRecord {
        k: state.k,
        err: relative(state.residual_fro, d_fro),
        zeta: state.zeta,
        sigma_r: state.sigma_window.get(r - 1).copied().unwrap_or(0.0),
        sigma_r_plus_1: state.sigma_window.get(r).copied().unwrap_or(0.0),
        sigma_window: state.sigma_window.clone(),
        residual_fro: state.residual_fro,
        support: state.support,
        secs,
        l_update_secs,
    }
}

/// Accelerated alternating projections from the two-step initialization,
/// iterating until the relative residual drops below `epsilon` or
/// `max_iter` iterations have run.
pub fn accaltproj_solve(d: &DenseMatrix, params: &RpcaParams) -> Result<RpcaSolution> {
    solve(d, params, SolverKind::AccAltProj)
}

/// Fixed-rank alternating projections baseline with the same
/// initialization, threshold schedule and stopping rule.
pub fn altproj_solve(d: &DenseMatrix, params: &RpcaParams) -> Result<RpcaSolution> {
    solve(d, params, SolverKind::AltProj)
}

pub fn solve(d: &DenseMatrix, params: &RpcaParams, kind: SolverKind) -> Result<RpcaSolution> {
    let d_fro = d.fro_norm();
    let start = Instant::now();
    let init = initialize_detailed(d, params)?;
    let init_secs = start.elapsed().as_secs_f64();

    let mut state = init.state;
    let mut trace = ConvergenceTrace {
        d_fro,
        init: InitRecord {
            sigma1_d: init.sigma1_d,
            zeta_pre: init.zeta_pre,
            pre_support: init.pre_sparse.count_nonzero(),
        },
        records: vec![record(&state, params.r, d_fro, init_secs, init_secs)],
    };

    let mut err = trace.final_err();
    while err >= params.epsilon && state.k < params.max_iter {
        let start = Instant::now();
        let (next, l_secs) = timed_step(kind, &state, d, params)?;
        state = next;
        let secs = start.elapsed().as_secs_f64();
        trace
            .records
            .push(record(&state, params.r, d_fro, secs, l_secs));
        err = trace.final_err();
        log::debug!(
            "{} k={} err={err:.3e} zeta={:.3e}",
            kind.id(),
            state.k,
            state.zeta
        );
    }

    Ok(RpcaSolution {
        low_rank: state.low_rank,
        sparse: state.sparse,
        converged: err < params.epsilon,
        trace,
    })
}
