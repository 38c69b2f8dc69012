//! Command-line surface.
//!
//! Every subcommand prints its primary artifact on stdout in the chosen
//! `--format`; with `--output-dir` all artifacts of the run are also written
//! there.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netid_core::dissimilar::DissimilarSolver;
use netid_core::epsclose::{
    augment, check_eps_bound, error_norm, gramian, lyapunov_residual, simulate_pair, solve_fixed_gramian_l1,
};
use netid_core::model::{seeded_rng, sparsity_mask};
use netid_core::observability::{analyze, classify_edges, enumerate_column_variants};
use netid_core::{Matrix, NetworkSystem, Vector, DEFAULT_PRESENCE_THRESHOLD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dot::to_dot;
use crate::experiment::{rows_to_csv, rows_to_svg, run_experiment, ExperimentConfig};
use crate::io::{read_matrix, read_system, write_text};
use crate::report::{
    analyze_report, dissimilar_report, epsclose_report, to_json, trajectory_csv, trajectory_report, trajectory_svg,
};
use crate::{CliError, CliResult};

/// Row-class tolerance used by `analyze`.
pub const DEFAULT_CLASS_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "netid", version, about = "Identifiability of partially measured linear networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// System JSON (experiment: configuration JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving every artifact of the run.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Edge presence threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Relative rank tolerance for the observability matrix; 0 picks the default.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long, env = "NETID_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(DEFAULT_PRESENCE_THRESHOLD)
    }
}

/// Where the second network comes from.
#[derive(Debug, Clone, Args)]
pub struct PerturbationArgs {
    /// Δ as CSV or JSON rows.
    #[arg(long, conflicts_with_all = ["perturbed", "witness"])]
    pub delta: Option<PathBuf>,
    /// A + Δ as CSV or JSON rows.
    #[arg(long, conflicts_with = "witness")]
    pub perturbed: Option<PathBuf>,
    /// Draw Δ = ΦV with Gaussian V from `--seed`.
    #[arg(long)]
    pub witness: bool,
    #[arg(long, default_value_t = 1.0)]
    pub witness_scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulationArgs {
    /// Comma-separated initial state; defaults to the unit vector along 1.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, nullspace, row classes and structural variant counts.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Largest n for which supports are enumerated.
        #[arg(long, default_value_t = netid_core::observability::DEFAULT_ENUMERATION_GUARD)]
        guard: usize,
        #[arg(long, default_value_t = DEFAULT_CLASS_TOL)]
        class_tol: f64,
    },
    /// Maximally dissimilar network with identical measurements.
    Dissimilar {
        #[command(flatten)]
        common: Common,
        /// Skip the ℓ2 sign certificate.
        #[arg(long)]
        no_certificate: bool,
    },
    /// Gramian of the augmented system and ε-closeness of the measurements.
    Epsclose {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        perturbation: PerturbationArgs,
        #[command(flatten)]
        simulation: SimulationArgs,
        /// Certify ‖e‖₂ < eps through the spectral cap.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Edge-flip phase transition over random ensembles.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// Overrides the configured trial count.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Output trajectories of A and A + Δ (Δ = 0 unless given).
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        perturbation: PerturbationArgs,
        #[command(flatten)]
        simulation: SimulationArgs,
    },
}

/// Text for stdout plus named artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub artifacts: Vec<(String, String)>,
}

fn pick_format(requested: Option<Format>, allowed: &[Format], command: &str) -> CliResult<Format> {
    let f = requested.unwrap_or(allowed[0]);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        let names: Vec<String> = allowed.iter().map(|f| format!("{f:?}").to_lowercase()).collect();
        Err(CliError::Usage(format!("{command} supports --format {}", names.join("|"))))
    }
}

fn artifact<'a>(artifacts: &'a [(String, String)], name: &str) -> &'a str {
    &artifacts.iter().find(|(n, _)| n == name).expect("artifact exists").1
}

fn parse_x0(text: Option<&str>, n: usize) -> CliResult<Vector> {
    match text {
        None => Ok(Vector::from_element(n, 1.0 / (n as f64).sqrt())),
        Some(s) => {
            let values = s
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--x0: cannot parse {f:?}"))))
                .collect::<CliResult<Vec<f64>>>()?;
            if values.len() != n {
                return Err(CliError::Usage(format!("--x0 has {} entries, system has n = {n}", values.len())));
            }
            Ok(Vector::from_vec(values))
        }
    }
}

fn perturbation(
    sys: &NetworkSystem,
    args: &PerturbationArgs,
    common: &Common,
    required: bool,
) -> CliResult<Matrix> {
    let n = sys.n();
    let check = |m: Matrix, what: &str| {
        if m.shape() != (n, n) {
            Err(CliError::Usage(format!("{what} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())))
        } else {
            Ok(m)
        }
    };
    if let Some(path) = &args.delta {
        return check(read_matrix(path)?, "Δ");
    }
    if let Some(path) = &args.perturbed {
        return Ok(check(read_matrix(path)?, "A + Δ")? - sys.a());
    }
    if args.witness {
        let an = analyze(sys, common.tol)?;
        let mut rng = seeded_rng(common.seed.unwrap_or(0));
        let v = Matrix::from_fn(an.nullity(), n, |_, _| rng.sample::<f64, _>(StandardNormal));
        return Ok(&an.phi * v * args.witness_scale);
    }
    if required {
        return Err(CliError::Usage("give one of --delta, --perturbed or --witness".into()));
    }
    Ok(Matrix::zeros(n, n))
}

pub fn run(cli: Cli) -> CliResult<Output> {
    let (output, dir) = match cli.command {
        Command::Analyze { common, guard, class_tol } => (cmd_analyze(&common, guard, class_tol)?, common.output_dir),
        Command::Dissimilar { common, no_certificate } => (cmd_dissimilar(&common, !no_certificate)?, common.output_dir),
        Command::Epsclose { common, perturbation, simulation, eps } => {
            (cmd_epsclose(&common, &perturbation, &simulation, eps)?, common.output_dir)
        }
        Command::Experiment { common, trials } => (cmd_experiment(&common, trials)?, common.output_dir),
        Command::Simulate { common, perturbation, simulation } => {
            (cmd_simulate(&common, &perturbation, &simulation)?, common.output_dir)
        }
    };
    if let Some(dir) = dir {
        write_artifacts(&dir, &output.artifacts)?;
    }
    Ok(output)
}

fn write_artifacts(dir: &Path, artifacts: &[(String, String)]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    for (name, text) in artifacts {
        write_text(&dir.join(name), text)?;
    }
    Ok(())
}

pub fn cmd_analyze(common: &Common, guard: usize, class_tol: f64) -> CliResult<Output> {
    pick_format(common.format, &[Format::Json], "analyze")?;
    let sys = read_system(&common.input)?;
    let an = analyze(&sys, common.tol)?;
    let classes = classify_edges(&an, class_tol);
    let variants = (0..sys.n())
        .map(|j| enumerate_column_variants(&an, sys.a(), j, common.threshold(), guard))
        .collect::<Result<Vec<_>, _>>();
    let json = to_json(&analyze_report(&sys, &an, &classes, variants));
    Ok(Output { stdout: json.clone(), artifacts: vec![("analyze.json".into(), json)] })
}

pub fn cmd_dissimilar(common: &Common, certify: bool) -> CliResult<Output> {
    let format = pick_format(common.format, &[Format::Json, Format::Dot], "dissimilar")?;
    let sys = read_system(&common.input)?;
    let an = analyze(&sys, common.tol)?;
    let thr = common.threshold();
    let result = DissimilarSolver { presence_threshold: thr, certify }.solve(&sys, &an)?;
    let measured = sys.measured_nodes().unwrap_or_default();
    let dot = to_dot("original", sys.a(), &measured, thr) + &to_dot("dissimilar", &result.network, &measured, thr);
    let json = to_json(&dissimilar_report(&sys, &result));
    let stdout = if format == Format::Dot { dot.clone() } else { json.clone() };
    Ok(Output { stdout, artifacts: vec![("dissimilar.json".into(), json), ("networks.dot".into(), dot)] })
}

pub fn cmd_epsclose(
    common: &Common,
    pert: &PerturbationArgs,
    sim: &SimulationArgs,
    eps: Option<f64>,
) -> CliResult<Output> {
    let format = pick_format(common.format, &[Format::Json, Format::Csv, Format::Svg], "epsclose")?;
    let sys = read_system(&common.input)?;
    let delta = perturbation(&sys, pert, common, true)?;
    let x0 = parse_x0(sim.x0.as_deref(), sys.n())?;
    let aug = augment(&sys, &delta)?;
    let gd = gramian(&aug)?;
    let norm = error_norm(&gd, &x0)?;
    let bound = eps.map(|e| check_eps_bound(&gd, &x0, e)).transpose()?;
    let trajectory = simulate_pair(&sys, &delta, &x0, sim.horizon, sim.dt)?;
    let residual = lyapunov_residual(&gd.wbar, &aug.abar, &aug.cbar);
    let mask = sparsity_mask(sys.a(), common.threshold())?;
    let fixed = solve_fixed_gramian_l1(&sys, &gd.wbar, &mask, common.threshold());
    let report = epsclose_report(&gd, x0.as_slice(), norm, &trajectory, bound.as_ref(), residual, fixed);
    let artifacts = vec![
        ("epsclose.json".to_string(), to_json(&report)),
        ("trajectory.csv".to_string(), trajectory_csv(&trajectory)),
        ("trajectory.svg".to_string(), trajectory_svg(&trajectory)),
    ];
    let stdout = match format {
        Format::Csv => artifact(&artifacts, "trajectory.csv"),
        Format::Svg => artifact(&artifacts, "trajectory.svg"),
        _ => artifact(&artifacts, "epsclose.json"),
    }
    .to_string();
    Ok(Output { stdout, artifacts })
}

pub fn read_experiment_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })
}

pub fn cmd_experiment(common: &Common, trials: Option<usize>) -> CliResult<Output> {
    let format = pick_format(common.format, &[Format::Csv, Format::Svg, Format::Json], "experiment")?;
    let mut cfg = read_experiment_config(&common.input)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(thr) = common.threshold {
        cfg.presence_threshold = thr;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if common.tol != 0.0 {
        cfg.rank_tol = common.tol;
    }
    let rows = run_experiment(&cfg, common.workers)?;
    let failures: usize = rows.iter().map(|r| r.failures).sum();
    if failures > 0 {
        eprintln!("warning: {failures} trial(s) failed and were excluded");
    }
    let artifacts = vec![
        ("experiment.csv".to_string(), rows_to_csv(&rows)),
        ("experiment.svg".to_string(), rows_to_svg(&rows)),
        ("experiment.json".to_string(), to_json(&rows)),
    ];
    let stdout = match format {
        Format::Svg => artifact(&artifacts, "experiment.svg"),
        Format::Json => artifact(&artifacts, "experiment.json"),
        _ => artifact(&artifacts, "experiment.csv"),
    }
    .to_string();
    Ok(Output { stdout, artifacts })
}

pub fn cmd_simulate(common: &Common, pert: &PerturbationArgs, sim: &SimulationArgs) -> CliResult<Output> {
    let format = pick_format(common.format, &[Format::Csv, Format::Json, Format::Svg], "simulate")?;
    let sys = read_system(&common.input)?;
    let delta = perturbation(&sys, pert, common, false)?;
    let x0 = parse_x0(sim.x0.as_deref(), sys.n())?;
    let trajectory = simulate_pair(&sys, &delta, &x0, sim.horizon, sim.dt)?;
    let artifacts = vec![
        ("trajectory.csv".to_string(), trajectory_csv(&trajectory)),
        ("trajectory.json".to_string(), to_json(&trajectory_report(&trajectory))),
        ("trajectory.svg".to_string(), trajectory_svg(&trajectory)),
    ];
    let stdout = match format {
        Format::Json => artifact(&artifacts, "trajectory.json"),
        Format::Svg => artifact(&artifacts, "trajectory.svg"),
        _ => artifact(&artifacts, "trajectory.csv"),
    }
    .to_string();
    Ok(Output { stdout, artifacts })
}
