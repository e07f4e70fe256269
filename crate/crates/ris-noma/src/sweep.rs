//! Parameter sweeps: delay and energy efficiency over (Λ, n_b), reliability
//! over a uniform β grid, and SJNR over the RIS size.

use rayon::prelude::*;
use ris_noma_core::link::{BeamformConfig, PowerAllocation};
use ris_noma_core::optimizer::run_ga_with;
use ris_noma_core::traffic::{frame_duration, FrameParams};
use ris_noma_core::{MetricsReport, SystemModel};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, ExperimentConfig, SweepPolicy};
use crate::output::{CsvRow, RunMeta, Stable, SweepResult};
use crate::parallel::Parallel;

/// Bisection steps used to refine a β threshold between two grid points.
const BISECTION_STEPS: usize = 60;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model error: {0}")]
    Model(#[from] ris_noma_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayEeRow {
    pub arrival_rate_pps: f64,
    pub blocklength: u32,
    pub retransmissions: u32,
    pub frame_duration_s: f64,
    pub utilization: f64,
    pub mean_delay_s: Stable,
    pub energy_efficiency_bits_per_j: Stable,
    pub reliability: f64,
}

impl CsvRow for DelayEeRow {
    const HEADER: &'static [&'static str] = &[
        "arrival_rate_pps",
        "blocklength",
        "retransmissions",
        "frame_duration_s",
        "utilization",
        "mean_delay_s",
        "energy_efficiency_bits_per_j",
        "reliability",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelBetaRow {
    pub elements: usize,
    pub beta: f64,
    pub sjnr_user1: f64,
    pub sjnr_min: f64,
    pub replica_success: f64,
    pub reliability: f64,
    pub meets_threshold: bool,
}

impl CsvRow for RelBetaRow {
    const HEADER: &'static [&'static str] = &[
        "elements",
        "beta",
        "sjnr_user1",
        "sjnr_min",
        "replica_success",
        "reliability",
        "meets_threshold",
    ];
}

/// Smallest β reaching the reliability threshold, per RIS size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub elements: usize,
    /// First grid point meeting the threshold.
    pub beta_grid: Option<f64>,
    /// Bisection between that grid point and its predecessor.
    pub beta_refined: Option<f64>,
    pub reference_beta: Option<f64>,
}

impl CsvRow for ThresholdRow {
    const HEADER: &'static [&'static str] = &["elements", "beta_grid", "beta_refined", "reference_beta"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SjnrRow {
    pub elements: usize,
    /// Mean β_n of the evaluated configuration.
    pub beta: f64,
    pub sjnr_user1: f64,
    pub sjnr_min: f64,
    /// γ₁(N) / γ₁(previous N) − 1.
    pub growth: Option<f64>,
    pub feasible: Option<bool>,
    pub reference_sjnr_user1: Option<f64>,
}

impl CsvRow for SjnrRow {
    const HEADER: &'static [&'static str] = &[
        "elements",
        "beta",
        "sjnr_user1",
        "sjnr_min",
        "growth",
        "feasible",
        "reference_sjnr_user1",
    ];
}

/// β thresholds quoted for N = 4 and N = 400.
pub const REFERENCE_BETA: [(usize, f64); 2] = [(4, 43.7), (400, 2.1)];
/// User-1 SJNR quoted for N = 4 and N = 400.
pub const REFERENCE_SJNR: [(usize, f64); 2] = [(4, 0.61), (400, 4.47)];

fn reference(table: &[(usize, f64)], n: usize) -> Option<f64> {
    table.iter().find(|(m, _)| *m == n).map(|(_, v)| *v)
}

fn policy_powers(cfg: &ExperimentConfig) -> Result<PowerAllocation, SweepError> {
    Ok(PowerAllocation::new(cfg.sweep.policy_user_powers_mw.iter().map(|p| p * 1e-3).collect())?)
}

fn policy_beam(cfg: &ExperimentConfig, model: &SystemModel, beta: f64) -> Result<BeamformConfig, SweepError> {
    let phases = model.cophased(cfg.sweep.cophase_user)?;
    Ok(BeamformConfig::uniform(beta, phases, cfg.ga.beta_max)?)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn sorted<T: Copy + PartialOrd>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    v
}

/// Delay and energy efficiency over Λ × n_b, fixed policy at the configured
/// RIS size, every user at the same Λ.
pub fn sweep_delay_ee(cfg: &ExperimentConfig) -> Result<SweepResult<DelayEeRow>, SweepError> {
    let s = &cfg.sweep;
    let users = cfg.user_count();
    let powers = policy_powers(cfg)?;
    let blocklengths: Vec<u32> = (s.blocklength_start..=s.blocklength_stop)
        .step_by(s.blocklength_step as usize)
        .collect();
    let mut rows = Vec::new();
    for rate in sorted(&s.arrival_rates_pps) {
        let mut scenario = cfg.scenario(cfg.geometry.elements)?;
        scenario.arrival_rates = vec![rate; users];
        let model = SystemModel::new(scenario)?;
        let beam = policy_beam(cfg, &model, s.policy_beta)?;
        let chunk = blocklengths
            .par_iter()
            .map(|&nb| -> Result<DelayEeRow, SweepError> {
                let m = model.metrics(&beam, &powers, nb, s.delay_retransmissions)?;
                let fp = FrameParams::new(cfg.traffic.header_time_s, cfg.traffic.bandwidth_hz, nb)?;
                Ok(DelayEeRow {
                    arrival_rate_pps: rate,
                    blocklength: nb,
                    retransmissions: s.delay_retransmissions,
                    frame_duration_s: frame_duration(&fp),
                    utilization: m.utilization[0],
                    mean_delay_s: m.mean_delay[0].into(),
                    energy_efficiency_bits_per_j: m.energy_efficiency.into(),
                    reliability: m.reliability[0],
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.extend(chunk);
    }
    Ok(SweepResult { rows, meta: RunMeta::new(cfg) })
}

/// Grid of β values `start, start + step, …` up to `stop` inclusive.
pub fn beta_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| start + i as f64 * step).collect()
}

/// Reliability over a uniform β grid per RIS size, and the threshold β.
pub fn sweep_reliability_vs_beta(
    cfg: &ExperimentConfig,
) -> Result<(SweepResult<RelBetaRow>, SweepResult<ThresholdRow>), SweepError> {
    let s = &cfg.sweep;
    let powers = policy_powers(cfg)?;
    let grid = beta_grid(s.beta_start, s.beta_stop, s.beta_step);
    let thr = cfg.ga.rel_thr;
    let per_n = sorted(&s.rel_elements)
        .par_iter()
        .map(|&n| -> Result<(Vec<RelBetaRow>, ThresholdRow), SweepError> {
            let model = cfg.model(n)?;
            let eval = |beta: f64| -> Result<MetricsReport, SweepError> {
                let beam = policy_beam(cfg, &model, beta)?;
                Ok(model.metrics(&beam, &powers, s.rel_blocklength, s.rel_retransmissions)?)
            };
            let mut rows = Vec::with_capacity(grid.len());
            for &beta in &grid {
                let m = eval(beta)?;
                rows.push(RelBetaRow {
                    elements: n,
                    beta,
                    sjnr_user1: m.sjnr[0],
                    sjnr_min: min_of(&m.sjnr),
                    replica_success: m.replica_success,
                    reliability: m.reliability[0],
                    meets_threshold: m.reliability[0] >= thr,
                });
            }
            let first = rows.iter().position(|r| r.meets_threshold);
            let beta_refined = match first {
                None => None,
                Some(0) => Some(grid[0]),
                Some(i) => {
                    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
                    for _ in 0..BISECTION_STEPS {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if eval(mid)?.reliability[0] >= thr {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    Some(hi)
                }
            };
            let threshold = ThresholdRow {
                elements: n,
                beta_grid: first.map(|i| grid[i]),
                beta_refined,
                reference_beta: reference(&REFERENCE_BETA, n),
            };
            Ok((rows, threshold))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (rows, thresholds): (Vec<Vec<RelBetaRow>>, Vec<ThresholdRow>) = per_n.into_iter().unzip();
    let meta = RunMeta::new(cfg);
    Ok((
        SweepResult { rows: rows.into_iter().flatten().collect(), meta: meta.clone() },
        SweepResult { rows: thresholds, meta },
    ))
}

/// User-1 SJNR against the RIS size, under the fixed policy with constant
/// total amplification or with a GA run per size.
pub fn sweep_sjnr_vs_n(cfg: &ExperimentConfig) -> Result<SweepResult<SjnrRow>, SweepError> {
    let s = &cfg.sweep;
    let elements = sorted(&s.sjnr_elements);
    let mut rows: Vec<SjnrRow> = Vec::with_capacity(elements.len());
    for &n in &elements {
        let (beta, sjnr, feasible) = match s.policy {
            SweepPolicy::Fixed => {
                let model = cfg.model(n)?;
                let beta = s.total_amplification / n as f64;
                let beam = policy_beam(cfg, &model, beta)?;
                (beta, model.sjnr_all(&beam, &policy_powers(cfg)?)?, None)
            }
            SweepPolicy::Ga => {
                cfg.check_optimize_size(n)?;
                let problem = cfg.problem(n)?;
                let result = run_ga_with(&problem, &cfg.ga_settings(), &Parallel)?;
                let x = &result.best_solution;
                let beam = x.beamform(cfg.ga.beta_max)?;
                let sjnr = problem.model().sjnr_all(&beam, &x.powers()?)?;
                let beta = x.amplitudes.iter().sum::<f64>() / n as f64;
                (beta, sjnr, Some(result.feasible))
            }
        };
        let growth = rows.last().map(|prev| sjnr[0] / prev.sjnr_user1 - 1.0);
        rows.push(SjnrRow {
            elements: n,
            beta,
            sjnr_user1: sjnr[0],
            sjnr_min: min_of(&sjnr),
            growth,
            feasible,
            reference_sjnr_user1: reference(&REFERENCE_SJNR, n),
        });
    }
    Ok(SweepResult { rows, meta: RunMeta::new(cfg) })
}

/// Shape of an SJNR-vs-N curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauReport {
    /// First N whose SJNR lies within the band below the maximum.
    pub onset: usize,
    /// SJNR non-decreasing up to and including the onset.
    pub monotone_before_onset: bool,
    /// Every N from the onset on stays inside the band.
    pub within_band_after: bool,
    pub max_sjnr: f64,
}

pub fn plateau(rows: &[SjnrRow], band: f64) -> Option<PlateauReport> {
    let max_sjnr = rows.iter().map(|r| r.sjnr_user1).fold(f64::NEG_INFINITY, f64::max);
    let floor = (1.0 - band) * max_sjnr;
    let idx = rows.iter().position(|r| r.sjnr_user1 >= floor)?;
    Some(PlateauReport {
        onset: rows[idx].elements,
        monotone_before_onset: rows[..=idx].windows(2).all(|w| w[1].sjnr_user1 >= w[0].sjnr_user1),
        within_band_after: rows[idx..].iter().all(|r| r.sjnr_user1 >= floor),
        max_sjnr,
    })
}

/// Relative SJNR growth between two swept sizes.
pub fn relative_growth(rows: &[SjnrRow], from: usize, to: usize) -> Option<f64> {
    let at = |n: usize| rows.iter().find(|r| r.elements == n).map(|r| r.sjnr_user1);
    Some(at(to)? / at(from)? - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_grid_is_inclusive() {
        let g = beta_grid(0.0, 1.0, 0.25);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(beta_grid(0.0, 100.0, 0.5).len(), 201);
    }

    #[test]
    fn plateau_detection() {
        let row = |n: usize, g: f64| SjnrRow {
            elements: n,
            beta: 0.0,
            sjnr_user1: g,
            sjnr_min: g,
            growth: None,
            feasible: None,
            reference_sjnr_user1: None,
        };
        let rows = vec![row(4, 1.0), row(16, 2.0), row(36, 4.0), row(64, 3.95), row(100, 4.0)];
        let p = plateau(&rows, 0.02).unwrap();
        assert_eq!(p.onset, 36);
        assert!(p.monotone_before_onset && p.within_band_after);
        let rows = vec![row(4, 2.0), row(16, 1.0), row(36, 4.0)];
        assert!(!plateau(&rows, 0.02).unwrap().monotone_before_onset);
        assert_eq!(relative_growth(&rows, 4, 36), Some(1.0));
        assert_eq!(relative_growth(&rows, 4, 9), None);
    }
}
