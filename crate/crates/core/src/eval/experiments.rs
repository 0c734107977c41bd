//! Success-rate grids over `(alpha, c)` and runtime sweeps over `n`.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{low_rank_error, RECOVERY_TOLERANCE};
use crate::error::{Result, RpcaError};
use crate::rpca::{initialize, solve, timed_step, ConvergenceTrace, RpcaParams, SolverKind};
use crate::synth::{generate, SyntheticProblem, SyntheticSpec};

/// The solver configurations compared by the harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    AccaltprojTrim,
    AccaltprojNoTrim,
    Altproj,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::AccaltprojTrim,
        Variant::AccaltprojNoTrim,
        Variant::Altproj,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Variant::AccaltprojTrim => "accaltproj_trim",
            Variant::AccaltprojNoTrim => "accaltproj_no_trim",
            Variant::Altproj => "altproj",
        }
    }

    pub fn kind(self) -> SolverKind {
        match self {
            Variant::Altproj => SolverKind::AltProj,
            _ => SolverKind::AccAltProj,
        }
    }

    pub fn trim(self) -> bool {
        self == Variant::AccaltprojTrim
    }
}

/// Parameters the harness hands to a solver for a generated problem: the
/// recommended values built from the true incoherence, the declared `alpha`,
/// and the requested tolerance and iteration cap. `gamma` overrides the
/// decay rate picked from `alpha`.
pub fn harness_params(
    prob: &SyntheticProblem,
    variant: Variant,
    tol: f64,
    max_iter: usize,
    gamma: Option<f64>,
) -> RpcaParams {
    let spec = &prob.spec;
    let params = RpcaParams::recommended(spec.r, prob.mu_true, spec.m, spec.n)
        .with_declared_sparsity(spec.alpha)
        .with_epsilon(tol)
        .with_max_iter(max_iter)
        .with_trim(variant.trim());
    match gamma {
        Some(g) => params.with_gamma(g),
        None => params,
    }
}

/// `count` seeds drawn from a generator seeded with `master`.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Threshold decay rate used by the desk-scale success grid.
pub const DESK_GAMMA: f64 = 0.65;

fn default_phase_tol() -> f64 {
    1e-6
}

fn default_runtime_tol() -> f64 {
    1e-4
}

fn default_max_iter() -> usize {
    100
}

fn all_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

/// Grid of `(alpha, c)` cells with a fixed number of trials per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    pub r: usize,
    pub alphas: Vec<f64>,
    pub cs: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_phase_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Fixed threshold decay rate; picked from `alpha` when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "all_variants")]
    pub solvers: Vec<Variant>,
}

impl PhaseConfig {
    /// `n = 200`, `r = 5`, `c = 1`, ten trials per `alpha`, `gamma = 0.65`.
    ///
    /// At this size the error contracts more slowly than a halving threshold,
    /// so `gamma = 0.5` lets the sparse estimate absorb low-rank error.
    pub fn desk_scale(alphas: Vec<f64>, seed: u64) -> Self {
        Self {
            n: 200,
            m: None,
            r: 5,
            alphas,
            cs: vec![1.0],
            trials: 10,
            seed,
            tol: default_phase_tol(),
            max_iter: default_max_iter(),
            gamma: Some(DESK_GAMMA),
            solvers: all_variants(),
        }
    }

    /// `n = 2500`, `r = 5`, `c ∈ {0.2, 1, 5}`, `alpha` from 0.3 to 0.75.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            n: 2500,
            cs: vec![0.2, 1.0, 5.0],
            alphas: (0..10).map(|i| 0.3 + 0.05 * i as f64).collect(),
            gamma: None,
            ..Self::desk_scale(Vec::new(), seed)
        }
    }

    pub fn rows(&self) -> usize {
        self.m.unwrap_or(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.cs.is_empty() {
            return Err(RpcaError::InvalidParam("empty experiment grid".into()));
        }
        if self.trials == 0 {
            return Err(RpcaError::InvalidParam("trials must be positive".into()));
        }
        if self.solvers.is_empty() {
            return Err(RpcaError::InvalidParam("no solvers selected".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(RpcaError::InvalidParam(format!(
                "tol = {} must be > 0",
                self.tol
            )));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(RpcaError::InvalidParam(format!(
                    "gamma = {g} must lie in [0, 1)"
                )));
            }
        }
        for &alpha in &self.alphas {
            for &c in &self.cs {
                SyntheticSpec {
                    m: self.rows(),
                    n: self.n,
                    r: self.r,
                    alpha,
                    c,
                    seed: 0,
                }
                .validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub solver: Variant,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub c: f64,
    pub mu_true: f64,
    pub kappa_true: f64,
    pub params: RpcaParams,
    pub iterations: usize,
    pub final_err: f64,
    pub converged: bool,
    /// `‖L_k − L‖_F / ‖L‖_F`.
    pub low_rank_error: f64,
    pub success: bool,
    pub wall_secs: f64,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    pub alpha: f64,
    pub c: f64,
    pub solver: Variant,
    pub successes: usize,
    pub trials: usize,
}

/// Whether success counts never increase with `alpha` for one `(c, solver)`
/// row of the table. Observed on the run's own data, not guaranteed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicitySummary {
    pub c: f64,
    pub solver: Variant,
    pub non_increasing_in_alpha: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub config: PhaseConfig,
    pub success_tolerance: f64,
    pub trials: Vec<TrialRecord>,
    pub cells: Vec<CellSummary>,
    pub monotonicity: Vec<MonotonicitySummary>,
}

impl PhaseReport {
    pub fn successes(&self, alpha: f64, c: f64, solver: Variant) -> Option<usize> {
        self.cells
            .iter()
            .find(|s| s.alpha == alpha && s.c == c && s.solver == solver)
            .map(|s| s.successes)
    }
}

/// Runs every selected solver on `trials` generated problems per
/// `(alpha, c)` cell and counts recoveries with relative low-rank error at
/// most [`RECOVERY_TOLERANCE`].
///
/// Trials run in parallel; rows are ordered by `(cell, trial, solver)`.
/// Cells are ordered `c`-major, then by `alpha`.
pub fn run_phase_experiment(config: &PhaseConfig) -> Result<PhaseReport> {
    config.validate()?;
    let cells: Vec<(f64, f64)> = config
        .cs
        .iter()
        .flat_map(|&c| config.alphas.iter().map(move |&alpha| (alpha, c)))
        .collect();
    let seeds = derive_seeds(config.seed, cells.len() * config.trials);
    let jobs: Vec<(usize, usize, f64, f64, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, &(alpha, c))| {
            let seeds = &seeds;
            (0..config.trials).map(move |t| (ci, t, alpha, c, seeds[ci * config.trials + t]))
        })
        .collect();

    let per_job: Vec<Result<Vec<TrialRecord>>> = jobs
        .par_iter()
        .map(|&(cell, trial, alpha, c, seed)| {
            let spec = SyntheticSpec {
                m: config.rows(),
                n: config.n,
                r: config.r,
                alpha,
                c,
                seed,
            };
            let prob = generate(&spec)?;
            config
                .solvers
                .iter()
                .map(|&solver| run_trial(&prob, solver, config, cell, trial))
                .collect()
        })
        .collect();
    let mut trials = Vec::new();
    for rows in per_job {
        trials.extend(rows?);
    }

    let mut summaries = Vec::new();
    for (ci, &(alpha, c)) in cells.iter().enumerate() {
        for &solver in &config.solvers {
            let successes = trials
                .iter()
                .filter(|t| t.cell == ci && t.solver == solver && t.success)
                .count();
            summaries.push(CellSummary {
                cell: ci,
                alpha,
                c,
                solver,
                successes,
                trials: config.trials,
            });
        }
    }
    let mut monotonicity = Vec::new();
    for &c in &config.cs {
        for &solver in &config.solvers {
            let mut row: Vec<(f64, usize)> = summaries
                .iter()
                .filter(|s| s.c == c && s.solver == solver)
                .map(|s| (s.alpha, s.successes))
                .collect();
            row.sort_by(|a, b| a.0.total_cmp(&b.0));
            let non_increasing = row.windows(2).all(|w| w[1].1 <= w[0].1);
            monotonicity.push(MonotonicitySummary {
                c,
                solver,
                non_increasing_in_alpha: non_increasing,
            });
        }
    }

    Ok(PhaseReport {
        config: config.clone(),
        success_tolerance: RECOVERY_TOLERANCE,
        trials,
        cells: summaries,
        monotonicity,
    })
}

fn run_trial(
    prob: &SyntheticProblem,
    solver: Variant,
    config: &PhaseConfig,
    cell: usize,
    trial: usize,
) -> Result<TrialRecord> {
    let params = harness_params(prob, solver, config.tol, config.max_iter, config.gamma);
    let start = Instant::now();
    let sol = solve(&prob.d, &params, solver.kind())?;
    let wall_secs = start.elapsed().as_secs_f64();
    let err = low_rank_error(&prob.l, &sol.low_rank.to_dense())?;
    let spec = &prob.spec;
    Ok(TrialRecord {
        cell,
        trial,
        seed: spec.seed,
        solver,
        m: spec.m,
        n: spec.n,
        r: spec.r,
        alpha: spec.alpha,
        c: spec.c,
        mu_true: prob.mu_true,
        kappa_true: prob.kappa_true,
        params,
        iterations: sol.trace.iterations(),
        final_err: sol.trace.final_err(),
        converged: sol.converged,
        low_rank_error: err,
        success: err <= RECOVERY_TOLERANCE,
        wall_secs,
        trace: sol.trace,
    })
}

/// Sweep over problem sizes at fixed rank and sparsity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuntimeConfig {
    pub sizes: Vec<usize>,
    pub r: usize,
    pub alpha: f64,
    pub c: f64,
    pub seed: u64,
    #[serde(default = "default_runtime_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "all_variants")]
    pub solvers: Vec<Variant>,
}

impl RuntimeConfig {
    /// `n ∈ {200, 500, 1000}`, `r = 5`, `alpha = 0.1`, `c = 1`.
    pub fn desk_scale(seed: u64) -> Self {
        Self {
            sizes: vec![200, 500, 1000],
            r: 5,
            alpha: 0.1,
            c: 1.0,
            seed,
            tol: default_runtime_tol(),
            max_iter: default_max_iter(),
            solvers: all_variants(),
        }
    }

    /// `n` from 1000 to 15000.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            sizes: vec![1000, 3000, 5000, 7000, 9000, 11000, 13000, 15000],
            ..Self::desk_scale(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(RpcaError::InvalidParam("no sizes given".into()));
        }
        if self.solvers.is_empty() {
            return Err(RpcaError::InvalidParam("no solvers selected".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(RpcaError::InvalidParam(format!(
                "tol = {} must be > 0",
                self.tol
            )));
        }
        for &n in &self.sizes {
            SyntheticSpec::square(n, self.r, self.alpha, self.c, 0).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub solver: Variant,
    pub seed: u64,
    pub iterations: usize,
    pub final_err: f64,
    pub success: bool,
    /// Initialization plus all iterations.
    pub wall_secs: f64,
    pub init_secs: f64,
    /// Mean over iterations, first iteration excluded as warm-up.
    pub mean_iter_secs: f64,
    /// Mean low-rank update time, first iteration excluded as warm-up.
    pub mean_l_update_secs: f64,
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeReport {
    pub config: RuntimeConfig,
    pub rows: Vec<TimingRow>,
}

/// Mean of the per-iteration times in records `1..`, skipping the first
/// iteration when there is more than one.
fn steady_mean(
    trace: &ConvergenceTrace,
    pick: impl Fn(&crate::rpca::IterationRecord) -> f64,
) -> f64 {
    let iters = &trace.records[1.min(trace.records.len())..];
    let steady = if iters.len() > 1 { &iters[1..] } else { iters };
    if steady.is_empty() {
        return 0.0;
    }
    steady.iter().map(pick).sum::<f64>() / steady.len() as f64
}

/// Solves one generated problem per size with each solver, sequentially so
/// timings do not compete for cores.
pub fn run_runtime_experiment(config: &RuntimeConfig) -> Result<RuntimeReport> {
    config.validate()?;
    let seeds = derive_seeds(config.seed, config.sizes.len());
    let mut rows = Vec::new();
    for (&n, &seed) in config.sizes.iter().zip(&seeds) {
        let prob = generate(&SyntheticSpec::square(
            n,
            config.r,
            config.alpha,
            config.c,
            seed,
        ))?;
        for &solver in &config.solvers {
            let params = harness_params(&prob, solver, config.tol, config.max_iter, None);
            let start = Instant::now();
            let sol = solve(&prob.d, &params, solver.kind())?;
            let wall_secs = start.elapsed().as_secs_f64();
            let err = low_rank_error(&prob.l, &sol.low_rank.to_dense())?;
            rows.push(TimingRow {
                n,
                solver,
                seed,
                iterations: sol.trace.iterations(),
                final_err: sol.trace.final_err(),
                success: err <= RECOVERY_TOLERANCE,
                wall_secs,
                init_secs: sol.trace.records[0].secs,
                mean_iter_secs: steady_mean(&sol.trace, |r| r.secs),
                mean_l_update_secs: steady_mean(&sol.trace, |r| r.l_update_secs),
                trace: sol.trace,
            });
        }
    }
    Ok(RuntimeReport {
        config: config.clone(),
        rows,
    })
}

/// Times the low-rank update of `variant` over `iterations` consecutive
/// iterations, after one untimed warm-up iteration, starting from the
/// initialization of `prob`. Iterations continue past convergence.
pub fn l_update_times(
    prob: &SyntheticProblem,
    variant: Variant,
    iterations: usize,
) -> Result<Vec<f64>> {
    let params = harness_params(prob, variant, f64::MIN_POSITIVE, usize::MAX, None);
    let mut state = initialize(&prob.d, &params)?;
    let mut times = Vec::with_capacity(iterations);
    for i in 0..=iterations {
        let (next, secs) = timed_step(variant.kind(), &state, &prob.d, &params)?;
        state = next;
        if i > 0 {
            times.push(secs);
        }
    }
    Ok(times)
}
