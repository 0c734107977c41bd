//! Metrics and experiment harnesses.

mod experiments;
mod metrics;

pub use experiments::{
    derive_seeds, harness_params, l_update_times, run_phase_experiment, run_runtime_experiment,
    CellSummary, MonotonicitySummary, PhaseConfig, PhaseReport, RuntimeConfig, RuntimeReport,
    TimingRow, TrialRecord, Variant, DESK_GAMMA,
};
pub use metrics::{
    incoherence_of, low_rank_error, recovery_success, relative_error, sparsity_of,
    RECOVERY_TOLERANCE,
};
