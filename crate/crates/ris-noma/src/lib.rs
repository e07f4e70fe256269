//! Experiment harness around `ris-noma-core`: TOML configs, parameter sweeps,
//! GA runs with CSV/TOML outputs, and a discrete-event queue check.

pub mod config;
pub mod optimize;
pub mod output;
pub mod parallel;
pub mod queue_sim;
pub mod sweep;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, Preset};
pub use parallel::Parallel;
