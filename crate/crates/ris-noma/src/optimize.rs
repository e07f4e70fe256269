//! GA runs with their convergence trace and solution record on disk.

use std::fs;
use std::path::{Path, PathBuf};

use ris_noma_core::optimizer::{run_ga_with, GenerationStats, OptimizationResult, Violations};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{self, CsvRow, OutputError, RunMeta, Stable};
use crate::parallel::Parallel;

pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const SOLUTION_FILE: &str = "solution.toml";
pub const META_STEM: &str = "optimize";

#[derive(Debug, thiserror::Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model error: {0}")]
    Model(#[from] ris_noma_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub generation: usize,
    pub best_objective: f64,
    pub mean_objective: Option<f64>,
    pub feasible_fraction: f64,
    pub best_violation: f64,
}

impl CsvRow for ConvergenceRow {
    const HEADER: &'static [&'static str] =
        &["generation", "best_objective", "mean_objective", "feasible_fraction", "best_violation"];
}

impl From<&GenerationStats> for ConvergenceRow {
    fn from(g: &GenerationStats) -> Self {
        Self {
            generation: g.generation,
            best_objective: g.best_objective,
            mean_objective: g.mean_objective,
            feasible_fraction: g.feasible_fraction,
            best_violation: g.best_violation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub user_powers_w: Vec<f64>,
    pub phases_rad: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub blocklength: u32,
    pub retransmissions: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub sjnr: Vec<f64>,
    pub bler: Vec<f64>,
    pub replica_success: f64,
    pub reliability: Vec<f64>,
    pub utilization: Vec<f64>,
    pub mean_delay_s: Vec<Stable>,
    pub energy_efficiency_bits_per_j: Stable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub delay: f64,
    pub reliability: f64,
    pub stability: f64,
    pub ordering: f64,
}

impl From<Violations> for ViolationRecord {
    fn from(v: Violations) -> Self {
        Self { delay: v.delay, reliability: v.reliability, stability: v.stability, ordering: v.ordering }
    }
}

/// Everything about the returned solution, as written to `solution.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub config_hash: String,
    pub seed: u64,
    pub elements: usize,
    pub generations_run: usize,
    pub feasible: bool,
    pub best_eta_bits_per_j: f64,
    pub objective: f64,
    pub decision: DecisionRecord,
    pub metrics: MetricsRecord,
    pub violations: ViolationRecord,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub result: OptimizationResult,
    pub record: SolutionRecord,
    pub convergence_path: PathBuf,
    pub solution_path: PathBuf,
}

/// Runs the GA at the configured RIS size and builds the solution record.
pub fn optimize(cfg: &ExperimentConfig) -> Result<(OptimizationResult, SolutionRecord), OptimizeError> {
    let n = cfg.geometry.elements;
    cfg.check_optimize_size(n)?;
    let problem = cfg.problem(n)?;
    let result = run_ga_with(&problem, &cfg.ga_settings(), &Parallel)?;
    let x = &result.best_solution;
    let m = problem
        .model()
        .metrics(&x.beamform(cfg.ga.beta_max)?, &x.powers()?, x.blocklength, x.retransmissions)?;
    let record = SolutionRecord {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        elements: n,
        generations_run: result.fitness_history.len(),
        feasible: result.feasible,
        best_eta_bits_per_j: result.best_eta,
        objective: result.best_fitness.objective,
        decision: DecisionRecord {
            user_powers_w: x.user_powers.clone(),
            phases_rad: x.phases.clone(),
            amplitudes: x.amplitudes.clone(),
            blocklength: x.blocklength,
            retransmissions: x.retransmissions,
        },
        metrics: MetricsRecord {
            sjnr: m.sjnr,
            bler: m.bler,
            replica_success: m.replica_success,
            reliability: m.reliability,
            utilization: m.utilization,
            mean_delay_s: m.mean_delay.into_iter().map(Stable::from).collect(),
            energy_efficiency_bits_per_j: m.energy_efficiency.into(),
        },
        violations: result.constraint_violations.into(),
    };
    Ok((result, record))
}

/// Runs [`optimize`] and writes `convergence.csv`, `solution.toml` and the
/// metadata sidecar into `dir`. The first two depend only on config and seed.
pub fn run_optimize(cfg: &ExperimentConfig, dir: &Path) -> Result<OptimizeOutcome, OptimizeError> {
    let (result, record) = optimize(cfg)?;
    fs::create_dir_all(dir).map_err(|source| OutputError::Io { path: dir.to_path_buf(), source })?;
    let convergence_path = dir.join(CONVERGENCE_FILE);
    let rows: Vec<ConvergenceRow> = result.fitness_history.iter().map(ConvergenceRow::from).collect();
    output::write_csv(&convergence_path, &rows)?;
    let solution_path = dir.join(SOLUTION_FILE);
    output::write_toml(&solution_path, &record)?;
    output::write_toml(&output::meta_path(dir, META_STEM), &RunMeta::new(cfg))?;
    Ok(OptimizeOutcome { result, record, convergence_path, solution_path })
}

pub fn load_solution(path: &Path) -> Result<SolutionRecord, OutputError> {
    output::read_toml(path)
}
