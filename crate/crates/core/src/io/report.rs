use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::{PhaseReport, RuntimeReport};
use crate::rpca::{ConvergenceTrace, RpcaParams};
use crate::synth::SyntheticSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON object: `schema_version` followed by the body's fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            body,
        }
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, body: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Versioned::new(body))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Versioned<T>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Where the incoherence parameter of a run came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuSource {
    /// Given on the command line or in a config file.
    User,
    /// Incoherence of the best rank-`r` approximation of the input.
    Estimated,
}

/// Contents of `trace.json`.
///
/// `err[k] = trace.records[k].residual_fro / trace.d_fro`. `zeta[0]` is
/// `beta` times `sigma_window[0]` of record 0; for `k ≥ 1`,
/// `zeta[k] = beta (sigma_window[r] + gamma^k sigma_window[0])`, a missing
/// `sigma_window[r]` counting as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub params: RpcaParams,
    pub mu_source: MuSource,
    /// Seed of the randomized truncated SVD used above the dense cutoff.
    pub svd_seed: u64,
    pub input: String,
    pub rows: usize,
    pub cols: usize,
    pub converged: bool,
    pub iterations: usize,
    pub final_err: f64,
    pub wall_secs: f64,
    pub err: Vec<f64>,
    pub zeta: Vec<f64>,
    pub trace: ConvergenceTrace,
}

/// Contents of the `metadata.json` written next to a generated problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthMetadata {
    pub spec: SyntheticSpec,
    pub rng: String,
    pub support_size: usize,
    pub mu_true: f64,
    pub kappa_true: f64,
    pub sigma_r: f64,
    pub amplitude: f64,
    /// Largest row or column fill fraction of `S`.
    pub observed_sparsity: f64,
    pub files: SynthFiles,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthFiles {
    pub d: String,
    pub l: String,
    pub s: String,
}

/// Contents of the phase `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFile {
    pub rng: String,
    pub svd_seed: u64,
    pub wall_secs: f64,
    #[serde(flatten)]
    pub report: PhaseReport,
}

/// Contents of `timings.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFile {
    pub rng: String,
    pub svd_seed: u64,
    pub wall_secs: f64,
    #[serde(flatten)]
    pub report: RuntimeReport,
}

/// One row per `(alpha, c, solver)` cell.
pub fn phase_csv(report: &PhaseReport) -> String {
    let mut out = String::from("alpha,c,solver,successes,trials\n");
    for cell in &report.cells {
        out += &format!(
            "{:?},{:?},{},{},{}\n",
            cell.alpha,
            cell.c,
            cell.solver.id(),
            cell.successes,
            cell.trials
        );
    }
    out
}

/// `err_k` for every record of a trace.
pub fn errors_from_trace(trace: &ConvergenceTrace) -> Vec<f64> {
    trace
        .records
        .iter()
        .map(|r| {
            if trace.d_fro > 0.0 {
                r.residual_fro / trace.d_fro
            } else {
                r.err
            }
        })
        .collect()
}

/// `ζ_k` for every record of a trace, recomputed from the singular value
/// windows and the parameters.
pub fn zetas_from_trace(trace: &ConvergenceTrace, params: &RpcaParams) -> Vec<f64> {
    trace
        .records
        .iter()
        .map(|rec| {
            let top = rec.sigma_window.first().copied().unwrap_or(0.0);
            if rec.k == 0 {
                params.beta * top
            } else {
                let next = rec.sigma_window.get(params.r).copied().unwrap_or(0.0);
                params.beta * (next + params.gamma.powi(rec.k as i32) * top)
            }
        })
        .collect()
}
