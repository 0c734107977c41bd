use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use accaltproj::eval::{
    incoherence_of, run_phase_experiment, run_runtime_experiment, sparsity_of, PhaseConfig,
    RuntimeConfig,
};
use accaltproj::io::{
    errors_from_trace, load_config, phase_csv, read_matrix, write_json, write_matrix, BenchFile,
    MatrixFile, MatrixFormat, MuSource, PhaseFile, RunConfig, SolveReport, SynthFiles,
    SynthMetadata,
};
use accaltproj::numkernel::DEFAULT_SVD_SEED;
use accaltproj::rpca::{solve, RpcaParams, SolverKind};
use accaltproj::synth::{generate, SyntheticSpec, RNG_ID};

#[derive(Parser)]
#[command(version, about = "Low-rank plus sparse matrix decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a matrix into low-rank and sparse parts.
    Solve(SolveArgs),
    /// Generate a seeded synthetic problem.
    Synth(SynthArgs),
    /// Success rates over an (alpha, c) grid.
    Phase(PhaseArgs),
    /// Runtime sweep over problem sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Accaltproj,
    Altproj,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Accaltproj => SolverKind::AccAltProj,
            SolverArg::Altproj => SolverKind::AltProj,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Input matrix (.bin or .csv).
    #[arg(long)]
    input: PathBuf,
    /// Target rank.
    #[arg(long)]
    rank: Option<usize>,
    /// Incoherence estimate; the solver uses 1.1 times this value.
    /// Estimated from the input when absent.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    beta_init: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Stop once the relative residual drops below this value.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Skip the trim step.
    #[arg(long)]
    no_trim: bool,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// JSON file with `solver` and a complete `params` object. Excludes the
    /// individual parameter flags.
    #[arg(long, conflicts_with_all = ["rank", "mu", "beta", "beta_init", "gamma", "eps", "max_iter", "no_trim", "solver"])]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    /// Row count; defaults to `n`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "bin")]
    format: FormatArg,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bin,
    Csv,
}

#[derive(Args)]
struct PhaseArgs {
    /// JSON grid file.
    #[arg(long, conflicts_with = "full_scale")]
    grid: Option<PathBuf>,
    /// n = 2500 grid over alpha in 0.3..0.75 and c in {0.2, 1, 5}.
    #[arg(long)]
    full_scale: bool,
    /// Master seed for the built-in grids.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated problem sizes.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["full_scale", "config"])]
    sizes: Option<Vec<usize>>,
    /// n from 1000 to 15000.
    #[arg(long, conflicts_with = "config")]
    full_scale: bool,
    /// JSON runtime config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    rank: usize,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Synth(args) => run_synth(args).map(|()| ExitCode::SUCCESS),
        Command::Phase(args) => run_phase(args).map(|()| ExitCode::SUCCESS),
        Command::Bench(args) => run_bench(args).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}

fn prepare_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run_solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    let input = MatrixFile::infer(&args.input)?;
    let d = read_matrix(&input).with_context(|| format!("reading {}", args.input.display()))?;
    let (m, n) = d.shape();

    let (kind, params, mu_source) = match &args.config {
        Some(path) => {
            let cfg: RunConfig =
                load_config(path).with_context(|| format!("loading {}", path.display()))?;
            (cfg.solver, cfg.params, MuSource::User)
        }
        None => {
            let Some(r) = args.rank else {
                bail!("--rank is required without --config")
            };
            if r == 0 || r > m.min(n) {
                bail!("rank {r} out of range for a {m}x{n} matrix");
            }
            let (mu, source) = match args.mu {
                Some(mu) => (mu, MuSource::User),
                None => {
                    let mu = incoherence_of(&d, r).context("estimating the incoherence")?;
                    log::warn!("--mu not given; using {mu:.4} estimated from the rank-{r} part of the input");
                    (mu, MuSource::Estimated)
                }
            };
            let mut params = RpcaParams::recommended(r, mu, m, n).with_trim(!args.no_trim);
            if let Some(v) = args.beta {
                params.beta = v;
            }
            if let Some(v) = args.beta_init {
                params.beta_init = v;
            }
            if let Some(v) = args.gamma {
                params.gamma = v;
            }
            if let Some(v) = args.eps {
                params.epsilon = v;
            }
            if let Some(v) = args.max_iter {
                params.max_iter = v;
            }
            let kind = args.solver.map_or(SolverKind::AccAltProj, SolverKind::from);
            (kind, params, source)
        }
    };
    params.validate(m, n)?;

    prepare_dir(&args.out_dir)?;
    let start = Instant::now();
    let sol = solve(&d, &params, kind)?;
    let wall_secs = start.elapsed().as_secs_f64();

    write_matrix(
        &sol.low_rank.to_dense(),
        &MatrixFile::bin(args.out_dir.join("L.bin")),
    )?;
    write_matrix(&sol.sparse, &MatrixFile::bin(args.out_dir.join("S.bin")))?;
    let report = SolveReport {
        solver: kind.id().to_string(),
        mu_source,
        svd_seed: DEFAULT_SVD_SEED,
        input: args.input.display().to_string(),
        rows: m,
        cols: n,
        converged: sol.converged,
        iterations: sol.trace.iterations(),
        final_err: sol.trace.final_err(),
        wall_secs,
        err: errors_from_trace(&sol.trace),
        zeta: sol.trace.records.iter().map(|r| r.zeta).collect(),
        params,
        trace: sol.trace,
    };
    write_json(args.out_dir.join("trace.json"), &report)?;
    log::info!(
        "{} iterations, final err {:.3e}",
        report.iterations,
        report.final_err
    );
    if sol.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "not converged after {} iterations (err {:.3e} >= {:.3e})",
            report.iterations, report.final_err, report.params.epsilon
        );
        Ok(ExitCode::from(2))
    }
}

fn run_synth(args: SynthArgs) -> anyhow::Result<()> {
    let spec = SyntheticSpec {
        m: args.m.unwrap_or(args.n),
        n: args.n,
        r: args.rank,
        alpha: args.alpha,
        c: args.c,
        seed: args.seed,
    };
    spec.validate()?;
    prepare_dir(&args.out_dir)?;
    let start = Instant::now();
    let prob = generate(&spec)?;
    let wall_secs = start.elapsed().as_secs_f64();

    let (format, ext) = match args.format {
        FormatArg::Bin => (MatrixFormat::Bin, "bin"),
        FormatArg::Csv => (MatrixFormat::Csv, "csv"),
    };
    let names = SynthFiles {
        d: format!("D.{ext}"),
        l: format!("L.{ext}"),
        s: format!("S.{ext}"),
    };
    for (matrix, name) in [
        (&prob.d, &names.d),
        (&prob.l, &names.l),
        (&prob.s, &names.s),
    ] {
        write_matrix(
            matrix,
            &MatrixFile {
                format,
                path: args.out_dir.join(name),
            },
        )?;
    }
    let meta = SynthMetadata {
        rng: RNG_ID.to_string(),
        support_size: prob.support.len(),
        mu_true: prob.mu_true,
        kappa_true: prob.kappa_true,
        sigma_r: prob.sigma_r,
        amplitude: prob.amplitude,
        observed_sparsity: sparsity_of(&prob.s),
        files: names,
        wall_secs,
        spec,
    };
    write_json(args.out_dir.join("metadata.json"), &meta)?;
    Ok(())
}

fn run_phase(args: PhaseArgs) -> anyhow::Result<()> {
    let config = match (&args.grid, args.full_scale) {
        (Some(path), _) => {
            load_config(path).with_context(|| format!("loading {}", path.display()))?
        }
        (None, true) => PhaseConfig::full_scale(args.seed),
        (None, false) => PhaseConfig::desk_scale(vec![0.1, 0.2, 0.3], args.seed),
    };
    config.validate()?;
    prepare_dir(&args.out_dir)?;
    let start = Instant::now();
    let report = run_phase_experiment(&config)?;
    let wall_secs = start.elapsed().as_secs_f64();
    fs::write(args.out_dir.join("report.csv"), phase_csv(&report))?;
    let file = PhaseFile {
        rng: RNG_ID.to_string(),
        svd_seed: DEFAULT_SVD_SEED,
        wall_secs,
        report,
    };
    write_json(args.out_dir.join("report.json"), &file)?;
    Ok(())
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    let config = if let Some(path) = &args.config {
        load_config(path).with_context(|| format!("loading {}", path.display()))?
    } else {
        let base = if args.full_scale {
            RuntimeConfig::full_scale(args.seed)
        } else {
            RuntimeConfig::desk_scale(args.seed)
        };
        RuntimeConfig {
            sizes: args.sizes.clone().unwrap_or(base.sizes),
            r: args.rank,
            alpha: args.alpha,
            c: args.c,
            ..base
        }
    };
    config.validate()?;
    prepare_dir(&args.out_dir)?;
    let start = Instant::now();
    let report = run_runtime_experiment(&config)?;
    let wall_secs = start.elapsed().as_secs_f64();
    let file = BenchFile {
        rng: RNG_ID.to_string(),
        svd_seed: DEFAULT_SVD_SEED,
        wall_secs,
        report,
    };
    write_json(args.out_dir.join("timings.json"), &file)?;
    Ok(())
}
