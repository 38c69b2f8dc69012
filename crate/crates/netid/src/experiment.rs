//! Random-network phase-transition experiment.
//!
//! For every ensemble, sensor count and trial: draw a network, measure a
//! uniformly chosen set of nodes, solve for the maximally dissimilar
//! consistent network and record the percentage of flipped edges. Each
//! (ensemble, sensor count, trial) triple owns an independent ChaCha stream,
//! so results do not depend on the number of workers.

use std::fmt::Write;

use netid_core::dissimilar::DissimilarSolver;
use netid_core::model::{stream_rng, GraphEnsembleConfig, GraphModel, NetRng, NetworkSystem};
use netid_core::observability::analyze;
use netid_core::DEFAULT_PRESENCE_THRESHOLD;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::format_float;
use crate::svg::{line_chart, Series};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnsembleSpec {
    Er { n: usize, p_edge: f64 },
    Ws { n: usize, k: usize, beta: f64 },
}

impl EnsembleSpec {
    pub fn config(&self) -> GraphEnsembleConfig {
        match *self {
            EnsembleSpec::Er { n, p_edge } => GraphEnsembleConfig { model: GraphModel::ErdosRenyi { p_edge }, n, seed: 0 },
            EnsembleSpec::Ws { n, k, beta } => GraphEnsembleConfig { model: GraphModel::WattsStrogatz { k, beta }, n, seed: 0 },
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            EnsembleSpec::Er { n, .. } | EnsembleSpec::Ws { n, .. } => n,
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_PRESENCE_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensembles: Vec<EnsembleSpec>,
    pub measured_counts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub presence_threshold: f64,
    /// Relative rank tolerance for the observability matrix; 0 selects the
    /// default.
    #[serde(default)]
    pub rank_tol: f64,
}

impl ExperimentConfig {
    /// 100-node Erdős–Rényi (p = 1/6) and Watts–Strogatz (K = 3, β = 1/30)
    /// ensembles, 1 to 20 sensors, 100 trials.
    pub fn reference() -> Self {
        ExperimentConfig {
            ensembles: vec![
                EnsembleSpec::Er { n: 100, p_edge: 1.0 / 6.0 },
                EnsembleSpec::Ws { n: 100, k: 3, beta: 1.0 / 30.0 },
            ],
            measured_counts: (1..=20).collect(),
            trials: 100,
            seed: 0,
            presence_threshold: DEFAULT_PRESENCE_THRESHOLD,
            rank_tol: 0.0,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        if self.ensembles.is_empty() || self.measured_counts.is_empty() {
            return Err(CliError::Usage("need at least one ensemble and one sensor count".into()));
        }
        for e in &self.ensembles {
            e.config().validate()?;
            if let Some(&m) = self.measured_counts.iter().find(|&&m| m == 0 || m > e.n()) {
                return Err(CliError::Usage(format!("sensor count {m} outside [1, {}]", e.n())));
            }
        }
        if !(self.presence_threshold >= 0.0) || !(self.rank_tol >= 0.0) {
            return Err(CliError::Usage("thresholds must be non-negative".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator of one trial: seeded from the master seed, ensemble index and
/// sensor count, on stream `trial`.
pub fn trial_rng(seed: u64, ensemble: usize, measured: usize, trial: u64) -> NetRng {
    let key = mix(mix(mix(seed) ^ ensemble as u64) ^ measured as u64);
    stream_rng(key, trial)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub flip_percentage: f64,
    pub rank: usize,
}

pub fn run_trial(
    cfg: &ExperimentConfig,
    ensemble: usize,
    measured: usize,
    trial: u64,
) -> Result<TrialOutcome, netid_core::Error> {
    let spec = cfg.ensembles[ensemble];
    let mut rng = trial_rng(cfg.seed, ensemble, measured, trial);
    let a = spec.config().generate_with(&mut rng)?;
    let nodes = sample(&mut rng, spec.n(), measured).into_vec();
    let sys = NetworkSystem::with_sensors(a, &nodes)?;
    let an = analyze(&sys, cfg.rank_tol)?;
    let solver = DissimilarSolver { presence_threshold: cfg.presence_threshold, certify: false };
    let result = solver.solve(&sys, &an)?;
    Ok(TrialOutcome { flip_percentage: result.flips.percentage, rank: an.rank })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub ensemble: String,
    pub n: usize,
    pub measured: usize,
    /// Successful trials.
    pub trials: usize,
    pub failures: usize,
    /// Mean flipped edges as a percentage of all `n²` ordered pairs.
    pub mean_flip_pct: f64,
    pub std_flip_pct: f64,
    pub mean_rank: f64,
}

/// Runs every trial on a pool of `workers` threads (rayon's default when
/// `None`). Rows come out in configuration order.
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> CliResult<Vec<ExperimentRow>> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;

    let cells: Vec<(usize, usize)> = (0..cfg.ensembles.len())
        .flat_map(|e| cfg.measured_counts.iter().map(move |&m| (e, m)))
        .collect();
    let jobs: Vec<(usize, usize, u64)> =
        cells.iter().flat_map(|&(e, m)| (0..cfg.trials as u64).map(move |t| (e, m, t))).collect();
    let outcomes: Vec<_> = pool.install(|| jobs.par_iter().map(|&(e, m, t)| run_trial(cfg, e, m, t)).collect());

    let mut rows = Vec::with_capacity(cells.len());
    for (k, &(e, m)) in cells.iter().enumerate() {
        let chunk = &outcomes[k * cfg.trials..(k + 1) * cfg.trials];
        let mut ok = Vec::new();
        for (t, outcome) in chunk.iter().enumerate() {
            match outcome {
                Ok(o) => ok.push(*o),
                Err(err) => eprintln!("warning: ensemble {e} sensors {m} trial {t} failed: {err}"),
            }
        }
        let count = ok.len();
        let mean = if count > 0 { ok.iter().map(|o| o.flip_percentage).sum::<f64>() / count as f64 } else { f64::NAN };
        let var = if count > 1 {
            ok.iter().map(|o| (o.flip_percentage - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        let mean_rank = if count > 0 { ok.iter().map(|o| o.rank as f64).sum::<f64>() / count as f64 } else { f64::NAN };
        let spec = cfg.ensembles[e];
        rows.push(ExperimentRow {
            ensemble: spec.config().name().to_string(),
            n: spec.n(),
            measured: m,
            trials: count,
            failures: cfg.trials - count,
            mean_flip_pct: mean,
            std_flip_pct: var.sqrt(),
            mean_rank,
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "ensemble,n,measured,trials,failures,mean_flip_pct_of_n2,std_flip_pct_of_n2,mean_rank";

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.ensemble,
            r.n,
            r.measured,
            r.trials,
            r.failures,
            format_float(r.mean_flip_pct),
            format_float(r.std_flip_pct),
            format_float(r.mean_rank)
        )
        .unwrap();
    }
    out
}

/// One curve per ensemble: mean flip percentage against sensor count.
pub fn rows_to_svg(rows: &[ExperimentRow]) -> String {
    let mut series: Vec<Series> = Vec::new();
    for r in rows {
        let name = format!("{} (n = {})", r.ensemble.to_uppercase(), r.n);
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => {
                s.xs.push(r.measured as f64);
                s.ys.push(r.mean_flip_pct);
            }
            None => series.push(Series::new(name, vec![r.measured as f64], vec![r.mean_flip_pct])),
        }
    }
    line_chart("Edges flipped vs. measured nodes", "measured nodes", "edges flipped (% of n²)", &series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            ensembles: vec![EnsembleSpec::Er { n: 8, p_edge: 0.3 }, EnsembleSpec::Ws { n: 8, k: 2, beta: 0.2 }],
            measured_counts: vec![1, 4, 8],
            trials: 3,
            seed: 5,
            presence_threshold: 1e-5,
            rank_tol: 0.0,
        }
    }

    #[test]
    fn schedule_independent() {
        let one = rows_to_csv(&run_experiment(&small(), Some(1)).unwrap());
        let four = rows_to_csv(&run_experiment(&small(), Some(4)).unwrap());
        assert_eq!(one, four);
        assert!(one.starts_with(CSV_HEADER));
        assert_eq!(one.lines().count(), 7);
    }

    #[test]
    fn fully_measured_flips_nothing() {
        let rows = run_experiment(&small(), Some(2)).unwrap();
        for r in rows.iter().filter(|r| r.measured == 8) {
            assert_eq!(r.mean_flip_pct, 0.0);
            assert_eq!(r.mean_rank, 8.0);
        }
    }

    #[test]
    fn bundled_configs_match_reference() {
        let text = include_str!("../../../data/experiment.json");
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg, ExperimentConfig::reference());
        let small: ExperimentConfig = serde_json::from_str(include_str!("../../../data/experiment_small.json")).unwrap();
        small.validate().unwrap();
    }

    #[test]
    fn config_parsing() {
        let text = r#"{"ensembles": [{"model": "er", "n": 10, "p_edge": 0.2}, {"model": "ws", "n": 10, "k": 3, "beta": 0.1}],
                       "measured_counts": [1, 2], "trials": 2, "seed": 1}"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.presence_threshold, 1e-5);
        cfg.validate().unwrap();
        let bad = ExperimentConfig { measured_counts: vec![11], ..cfg };
        assert!(bad.validate().is_err());
    }
}
