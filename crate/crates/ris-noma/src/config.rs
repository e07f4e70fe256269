//! Experiment configuration: TOML with unit-suffixed keys, converted to SI
//! when the core model types are built.

use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ris_noma_core::channel::{Direction, LinkScenario, RisGeometry};
use ris_noma_core::link::NoiseConfig;
use ris_noma_core::optimizer::{ConstraintSet, GaSettings, Problem};
use ris_noma_core::{units, Scenario, SystemModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file not found: {0}")]
    Missing(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("unknown config key: {0}")]
    UnknownKey(String),
    #[error("{what} = {value} is not a perfect square")]
    NonSquare { what: &'static str, value: usize },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<ris_noma_core::Error> for ConfigError {
    fn from(e: ris_noma_core::Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Paper,
    #[default]
    Desk,
}

impl Preset {
    /// Largest RIS the preset will optimize over.
    pub fn element_cap(self) -> Option<usize> {
        match self {
            Preset::Paper => None,
            Preset::Desk => Some(64),
        }
    }

    fn settings(self) -> GaSettings {
        match self {
            Preset::Paper => GaSettings::paper(),
            Preset::Desk => GaSettings::desk(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepPolicy {
    /// Co-phased phases, uniform amplitudes, fixed powers.
    #[default]
    Fixed,
    /// A GA run per sweep point.
    Ga,
}

/// One rate for every user, or one per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArrivalRates {
    Shared(f64),
    PerUser(Vec<f64>),
}

impl ArrivalRates {
    pub fn resolve(&self, users: usize) -> Vec<f64> {
        match self {
            ArrivalRates::Shared(rate) => vec![*rate; users],
            ArrivalRates::PerUser(rates) => rates.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub geometry: GeometryConfig,
    pub scenario: ScenarioConfig,
    pub traffic: TrafficConfig,
    pub fbl: FblConfig,
    pub ga: GaConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            output_dir: PathBuf::from("out"),
            geometry: GeometryConfig::default(),
            scenario: ScenarioConfig::default(),
            traffic: TrafficConfig::default(),
            fbl: FblConfig::default(),
            ga: GaConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// N; the array is √N × √N.
    pub elements: usize,
    /// Δ_h, fraction of a wavelength.
    pub spacing_h: f64,
    /// Δ_v, fraction of a wavelength.
    pub spacing_v: f64,
    pub carrier_freq_hz: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { elements: 16, spacing_h: 0.25, spacing_v: 0.25, carrier_freq_hz: 28e9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub path_gain_db: f64,
    pub path_loss_exp: f64,
    pub dist_ris_bs_m: f64,
    pub dist_ris_ue_m: Vec<f64>,
    pub dist_jammer_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist_ris_jammer_m: Option<f64>,
    pub bs_azimuth_rad: f64,
    pub bs_elevation_rad: f64,
    pub user_azimuth_rad: Vec<f64>,
    pub user_elevation_rad: Vec<f64>,
    pub jammer_azimuth_rad: f64,
    pub jammer_elevation_rad: f64,
    pub jammer_power_mw: f64,
    pub ris_noise_dbm: f64,
    pub awgn_dbm: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            path_gain_db: 30.0,
            path_loss_exp: 2.0,
            dist_ris_bs_m: 4.0,
            dist_ris_ue_m: vec![20.0, 25.0],
            dist_jammer_m: 30.0,
            dist_ris_jammer_m: None,
            bs_azimuth_rad: PI / 6.0,
            bs_elevation_rad: 0.0,
            user_azimuth_rad: vec![PI / 2.0; 2],
            user_elevation_rad: vec![2.0 * PI; 2],
            jammer_azimuth_rad: PI / 4.0,
            jammer_elevation_rad: PI / 2.0,
            jammer_power_mw: 5.0,
            ris_noise_dbm: -100.0,
            awgn_dbm: -100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    pub header_time_s: f64,
    pub bandwidth_hz: f64,
    pub arrival_rate_pps: ArrivalRates,
    /// 𝓛 used when a command evaluates a single fixed configuration.
    pub retransmissions: u32,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            header_time_s: 30e-6,
            bandwidth_hz: 180e3,
            arrival_rate_pps: ArrivalRates::Shared(500.0),
            retransmissions: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FblConfig {
    pub payload_bytes: u32,
    /// n_b used when a command evaluates a single fixed configuration.
    pub blocklength: u32,
    /// Search box for n_b.
    pub blocklength_min: u32,
    pub blocklength_max: u32,
}

impl Default for FblConfig {
    fn default() -> Self {
        Self { payload_bytes: 32, blocklength: 108, blocklength_min: 32, blocklength_max: 1024 }
    }
}

/// GA operator settings (unset fields come from the preset) and the
/// constraint thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub preset: Preset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation_decay: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elite_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tournament_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stall_generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cophase_fraction: Option<f64>,
    pub delay_thr_s: f64,
    pub rel_thr: f64,
    pub beta_max: f64,
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    pub l_max: u32,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Desk,
            population_size: None,
            max_generations: None,
            crossover_rate: None,
            mutation_rate: None,
            mutation_scale: None,
            mutation_decay: None,
            elite_count: None,
            tournament_size: None,
            constraint_tolerance: None,
            function_tolerance: None,
            stall_generations: None,
            cophase_fraction: None,
            delay_thr_s: 1e-3,
            rel_thr: 0.99999,
            beta_max: 100.0,
            p_min_mw: 1e-3,
            p_max_mw: 100.0,
            l_max: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub policy: SweepPolicy,
    /// Fixed policy: user powers, co-phased user and uniform β.
    pub policy_user_powers_mw: Vec<f64>,
    pub cophase_user: usize,
    pub policy_beta: f64,
    // delay-ee
    pub arrival_rates_pps: Vec<f64>,
    pub blocklength_start: u32,
    pub blocklength_stop: u32,
    pub blocklength_step: u32,
    pub delay_retransmissions: u32,
    // rel-beta
    pub rel_elements: Vec<usize>,
    pub beta_start: f64,
    pub beta_stop: f64,
    pub beta_step: f64,
    pub rel_blocklength: u32,
    pub rel_retransmissions: u32,
    // sjnr-n
    pub sjnr_elements: Vec<usize>,
    /// Σβ_n held constant across N, so β = total / N.
    pub total_amplification: f64,
    /// Relative band around the maximum that counts as the plateau.
    pub plateau_band: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            policy: SweepPolicy::Fixed,
            policy_user_powers_mw: vec![3.92, 0.98],
            cophase_user: 2,
            policy_beta: 1.0,
            arrival_rates_pps: vec![100.0, 400.0, 700.0, 1000.0, 1300.0],
            blocklength_start: 100,
            blocklength_stop: 500,
            blocklength_step: 4,
            delay_retransmissions: 1,
            rel_elements: vec![4, 100, 400, 900],
            beta_start: 0.0,
            beta_stop: 100.0,
            beta_step: 0.5,
            rel_blocklength: 256,
            rel_retransmissions: 10,
            sjnr_elements: vec![4, 16, 36, 64, 100, 196, 400, 625, 900],
            total_amplification: 100.0,
            plateau_band: 0.02,
        }
    }
}

/// Side length of a square array with `n` elements.
pub fn square_side(what: &'static str, n: usize) -> Result<usize, ConfigError> {
    let side = (n as f64).sqrt().round() as usize;
    if n == 0 || side * side != n {
        return Err(ConfigError::NonSquare { what, value: n });
    }
    Ok(side)
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| match source.kind() {
        io::ErrorKind::NotFound => ConfigError::Missing(path.to_path_buf()),
        _ => ConfigError::Io { path: path.to_path_buf(), source },
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
    let cfg: ExperimentConfig = ExperimentConfig::deserialize(table).map_err(|e| {
        let msg = e.message().to_string();
        if msg.starts_with("unknown field") {
            ConfigError::UnknownKey(msg)
        } else {
            ConfigError::Syntax(msg)
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        square_side("geometry.elements", self.geometry.elements)?;
        for &n in self.sweep.rel_elements.iter().chain(&self.sweep.sjnr_elements) {
            square_side("sweep elements", n)?;
        }
        let users = self.scenario.dist_ris_ue_m.len();
        if users == 0 {
            return Err(ConfigError::Invalid("at least one user is required".into()));
        }
        for (name, len) in [
            ("scenario.user_azimuth_rad", self.scenario.user_azimuth_rad.len()),
            ("scenario.user_elevation_rad", self.scenario.user_elevation_rad.len()),
            ("traffic.arrival_rate_pps", self.traffic.arrival_rate_pps.resolve(users).len()),
            ("sweep.policy_user_powers_mw", self.sweep.policy_user_powers_mw.len()),
        ] {
            if len != users {
                return Err(ConfigError::Invalid(format!("{name} has {len} entries, expected {users}")));
            }
        }
        if !(1..=users).contains(&self.sweep.cophase_user) {
            return Err(ConfigError::Invalid(format!("sweep.cophase_user must be in 1..={users}")));
        }
        let s = &self.sweep;
        if s.blocklength_step == 0 || s.blocklength_start == 0 || s.blocklength_start > s.blocklength_stop {
            return Err(ConfigError::Invalid("sweep blocklength grid is empty".into()));
        }
        if !(s.beta_step > 0.0) || !(s.beta_start >= 0.0) || s.beta_start > s.beta_stop {
            return Err(ConfigError::Invalid("sweep beta grid is empty".into()));
        }
        if s.beta_stop > self.ga.beta_max {
            return Err(ConfigError::Invalid("sweep.beta_stop exceeds ga.beta_max".into()));
        }
        if !(s.plateau_band > 0.0 && s.plateau_band < 1.0) {
            return Err(ConfigError::Invalid("sweep.plateau_band must lie in (0, 1)".into()));
        }
        self.scenario(self.geometry.elements)?.validate()?;
        self.constraints().validate()?;
        self.ga_settings().validate()?;
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.scenario.dist_ris_ue_m.len()
    }

    pub fn payload_bits(&self) -> u32 {
        self.fbl.payload_bytes * 8
    }

    /// SI scenario for a square RIS with `elements` elements.
    pub fn scenario(&self, elements: usize) -> Result<Scenario, ConfigError> {
        let side = square_side("elements", elements)?;
        let g = &self.geometry;
        let sc = &self.scenario;
        let geometry = RisGeometry::new(side, side, g.spacing_h, g.spacing_v, g.carrier_freq_hz)?;
        let dir_users = sc
            .user_azimuth_rad
            .iter()
            .zip(&sc.user_elevation_rad)
            .map(|(&a, &e)| Direction::new(a, e))
            .collect();
        let link = LinkScenario {
            path_gain_ref: units::db_to_linear(sc.path_gain_db),
            path_loss_exp: sc.path_loss_exp,
            dist_ris_bs: sc.dist_ris_bs_m,
            dist_ris_ue: sc.dist_ris_ue_m.clone(),
            dist_jammer: sc.dist_jammer_m,
            dist_ris_jammer: sc.dist_ris_jammer_m,
            dir_bs: Direction::new(sc.bs_azimuth_rad, sc.bs_elevation_rad),
            dir_jammer: Direction::new(sc.jammer_azimuth_rad, sc.jammer_elevation_rad),
            dir_users,
            jammer_power: sc.jammer_power_mw * 1e-3,
        };
        Ok(Scenario {
            geometry,
            link,
            noise: NoiseConfig::from_dbm(sc.ris_noise_dbm, sc.awgn_dbm)?,
            header_time: self.traffic.header_time_s,
            bandwidth: self.traffic.bandwidth_hz,
            payload_bits: self.payload_bits(),
            arrival_rates: self.traffic.arrival_rate_pps.resolve(self.user_count()),
        })
    }

    pub fn model(&self, elements: usize) -> Result<SystemModel, ConfigError> {
        Ok(SystemModel::new(self.scenario(elements)?)?)
    }

    pub fn constraints(&self) -> ConstraintSet {
        let ga = &self.ga;
        ConstraintSet {
            delay_thr: ga.delay_thr_s,
            rel_thr: ga.rel_thr,
            beta_max: ga.beta_max,
            p_min: ga.p_min_mw * 1e-3,
            p_max: ga.p_max_mw * 1e-3,
            l_max: ga.l_max,
            blocklength_min: self.fbl.blocklength_min,
            blocklength_max: self.fbl.blocklength_max,
        }
    }

    pub fn problem(&self, elements: usize) -> Result<Problem, ConfigError> {
        Ok(Problem::new(self.model(elements)?, self.constraints())?)
    }

    /// Preset settings with every explicit `[ga]` override applied.
    pub fn ga_settings(&self) -> GaSettings {
        let ga = &self.ga;
        let mut s = ga.preset.settings();
        s.rng_seed = self.seed;
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = ga.$field { s.$field = v; })*
            };
        }
        take!(
            population_size,
            max_generations,
            crossover_rate,
            mutation_scale,
            mutation_decay,
            elite_count,
            tournament_size,
            constraint_tolerance,
            function_tolerance,
            stall_generations,
            cophase_fraction
        );
        if ga.mutation_rate.is_some() {
            s.mutation_rate = ga.mutation_rate;
        }
        s
    }

    /// Checks that `elements` is allowed for a GA run under the preset.
    pub fn check_optimize_size(&self, elements: usize) -> Result<(), ConfigError> {
        match self.ga.preset.element_cap() {
            Some(cap) if elements > cap => Err(ConfigError::Invalid(format!(
                "{elements} elements exceed the {cap}-element cap of the desk preset"
            ))),
            _ => Ok(()),
        }
    }

    /// Canonical TOML of the resolved config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_table_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let s = cfg.scenario(16).unwrap();
        assert_eq!(s.link.path_gain_ref, 1000.0);
        assert_eq!(s.link.jammer_power, 5e-3);
        assert_eq!(s.payload_bits, 256);
        assert_eq!(s.bandwidth, 180e3);
        assert_eq!(s.header_time, 30e-6);
        assert_eq!(s.geometry.carrier_freq(), 28e9);
        assert!((s.noise.awgn_var - 1e-13).abs() < 1e-27);
        assert_eq!(s.arrival_rates, vec![500.0, 500.0]);
    }

    #[test]
    fn override_changes_only_that_key() {
        let cfg = parse_config("[traffic]\narrival_rate_pps = 100.0\n").unwrap();
        let mut expected = ExperimentConfig::default();
        expected.traffic.arrival_rate_pps = ArrivalRates::Shared(100.0);
        assert_eq!(cfg, expected);
        let cfg = parse_config("[traffic]\narrival_rate_pps = [100.0, 200.0]\n").unwrap();
        assert_eq!(cfg.scenario(4).unwrap().arrival_rates, vec![100.0, 200.0]);
    }

    #[test]
    fn error_kinds_are_distinct() {
        assert!(matches!(
            parse_config("[geometry]\nelements = 5\n"),
            Err(ConfigError::NonSquare { value: 5, .. })
        ));
        assert!(matches!(
            parse_config("[sweep]\nsjnr_elements = [4, 8]\n"),
            Err(ConfigError::NonSquare { value: 8, .. })
        ));
        assert!(matches!(parse_config("[geometry]\nrows = 2\n"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(parse_config("typo = 1\n"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(parse_config("[geometry\n"), Err(ConfigError::Syntax(_))));
        assert!(matches!(parse_config("[geometry]\nelements = \"x\"\n"), Err(ConfigError::Syntax(_))));
        assert!(matches!(
            load_config(Path::new("/nonexistent/cfg.toml")),
            Err(ConfigError::Missing(_))
        ));
        assert!(matches!(
            parse_config("[scenario]\ndist_ris_ue_m = [20.0]\n"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn canonical_toml_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.ga.population_size = Some(30);
        cfg.scenario.dist_ris_jammer_m = Some(12.5);
        let back = parse_config(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        cfg.seed += 1;
        assert_ne!(back.hash(), cfg.hash());
    }

    #[test]
    fn ga_overrides_apply_on_top_of_preset() {
        let cfg = parse_config("seed = 9\n[ga]\npreset = \"paper\"\nmax_generations = 3\n").unwrap();
        let s = cfg.ga_settings();
        assert_eq!(s.population_size, 2000);
        assert_eq!(s.max_generations, 3);
        assert_eq!(s.rng_seed, 9);
        let desk = ExperimentConfig::default();
        assert!(desk.check_optimize_size(64).is_ok());
        assert!(desk.check_optimize_size(100).is_err());
    }
}
