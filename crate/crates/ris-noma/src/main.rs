use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ris_noma::config::{load_config, ConfigError, ExperimentConfig, Preset};
use ris_noma::optimize::{run_optimize, OptimizeError};
use ris_noma::output::{self, OutputError, RunMeta, SweepResult};
use ris_noma::queue_sim::md1_oracle;
use ris_noma::sweep::{self, SweepError};
use ris_noma_core::traffic::{frame_duration, FrameParams};

const EXIT_CONFIG: u8 = 1;
const EXIT_RESULT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Utilization levels checked by `mdl-oracle`.
const ORACLE_UTILIZATIONS: [f64; 4] = [0.1, 0.3, 0.5, 0.8];
const ORACLE_TOLERANCE: f64 = 0.02;

#[derive(Parser)]
#[command(name = "ris-noma", version, about = "Active-RIS NOMA uplink under jamming: sweeps and GA optimization")]
struct Cli {
    /// TOML config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the GA preset.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize energy efficiency with the GA.
    Optimize,
    /// Run a parameter sweep.
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
    },
    /// Compare a discrete-event M/D/1 simulation against the closed-form delay.
    MdlOracle {
        #[arg(long, default_value_t = 1_000_000)]
        arrivals: usize,
    },
}

#[derive(Subcommand)]
enum SweepKind {
    /// Delay and energy efficiency over arrival rate and blocklength.
    DelayEe,
    /// Reliability over a uniform amplification grid.
    RelBeta,
    /// User-1 SJNR over the RIS size.
    SjnrN,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Result(String),
    #[error("{0}")]
    Internal(String),
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(c) => CliError::Config(c),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Config(c) => CliError::Config(c),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<OutputError> for CliError {
    fn from(e: OutputError) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(preset) = cli.preset {
        cfg.ga.preset = preset;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write<R: output::CsvRow>(dir: &Path, stem: &str, result: &SweepResult<R>) -> Result<(), CliError> {
    let path = output::write_sweep(dir, stem, result)?;
    println!("wrote {} ({} rows)", path.display(), result.rows.len());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let dir = cfg.output_dir.clone();
    match &cli.command {
        Command::Optimize => {
            let out = run_optimize(&cfg, &dir)?;
            let r = &out.record;
            println!("wrote {}", out.convergence_path.display());
            println!("wrote {}", out.solution_path.display());
            println!(
                "feasible={} eta={:.6e} bits/J n_b={} L={} generations={}",
                r.feasible, r.best_eta_bits_per_j, r.decision.blocklength, r.decision.retransmissions, r.generations_run
            );
            if !r.feasible {
                return Err(CliError::Result("no feasible solution found".into()));
            }
        }
        Command::Sweep { kind: SweepKind::DelayEe } => {
            let result = sweep::sweep_delay_ee(&cfg)?;
            write(&dir, "delay_ee", &result)?;
        }
        Command::Sweep { kind: SweepKind::RelBeta } => {
            let (grid, thresholds) = sweep::sweep_reliability_vs_beta(&cfg)?;
            write(&dir, "rel_beta", &grid)?;
            write(&dir, "rel_beta_thresholds", &thresholds)?;
            for t in &thresholds.rows {
                println!(
                    "N={:<4} beta*={} (grid {}) reference {}",
                    t.elements,
                    fmt_sci(t.beta_refined),
                    fmt_sci(t.beta_grid),
                    fmt_opt(t.reference_beta)
                );
            }
        }
        Command::Sweep { kind: SweepKind::SjnrN } => {
            let result = sweep::sweep_sjnr_vs_n(&cfg)?;
            write(&dir, "sjnr_n", &result)?;
            for r in &result.rows {
                println!(
                    "N={:<4} sjnr_user1={:.6} growth={} reference {}",
                    r.elements,
                    r.sjnr_user1,
                    fmt_opt(r.growth),
                    fmt_opt(r.reference_sjnr_user1)
                );
            }
            if let Some(p) = sweep::plateau(&result.rows, cfg.sweep.plateau_band) {
                println!(
                    "plateau onset N={} monotone_before={} within_band_after={}",
                    p.onset, p.monotone_before_onset, p.within_band_after
                );
            }
        }
        Command::MdlOracle { arrivals } => {
            let fp = FrameParams::new(cfg.traffic.header_time_s, cfg.traffic.bandwidth_hz, cfg.fbl.blocklength)
                .map_err(|e| CliError::Config(e.into()))?;
            let service = cfg.sweep.delay_retransmissions as f64 * frame_duration(&fp);
            let rows = md1_oracle(service, &ORACLE_UTILIZATIONS, *arrivals, cfg.seed);
            write(&dir, "mdl_oracle", &SweepResult { rows: rows.clone(), meta: RunMeta::new(&cfg) })?;
            let mut ok = true;
            for r in &rows {
                let pass = r.relative_error <= ORACLE_TOLERANCE;
                ok &= pass;
                println!(
                    "rho={:.1} analytic={:.6e} simulated={:.6e} rel_err={:.4} {}",
                    r.utilization,
                    r.analytic_delay_s,
                    r.simulated_delay_s,
                    r.relative_error,
                    if pass { "ok" } else { "MISMATCH" }
                );
            }
            if !ok {
                return Err(CliError::Result("simulation outside tolerance".into()));
            }
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn fmt_sci(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::Result(_) => EXIT_RESULT,
                CliError::Internal(_) => EXIT_INTERNAL,
            })
        }
    }
}
