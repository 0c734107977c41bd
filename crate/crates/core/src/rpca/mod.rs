//! Low-rank plus sparse decomposition by (accelerated) alternating
//! projections.

mod factored;
mod params;
mod solver;
mod tangent;
mod threshold;
mod trim;

pub use factored::FactoredLowRank;
pub use params::{recommended_gamma, RpcaParams, HIGH_SPARSITY_ALPHA};
pub use solver::{
    accaltproj_solve, accaltproj_step, altproj_solve, altproj_step, initialize,
    initialize_detailed, solve, timed_step, ConvergenceTrace, InitRecord, Initialization,
    IterationRecord, IterationState, RpcaSolution, SolverKind,
};
pub use tangent::{structured_truncate, tangent_complement_project, tangent_project};
pub use threshold::{hard_threshold, threshold_value};
pub use trim::{refactor, trim, trim_rows, TrimmedFactors};
