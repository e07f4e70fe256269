//! The full scenario and the metric chain
//! channel → SJNR → BLER → reliability → delay → energy efficiency.

use alloc::vec::Vec;

use crate::channel::{Channels, LinkScenario, RisGeometry};
use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::link::{self, BeamformConfig, FblCode, NoiseConfig, PowerAllocation};
use crate::traffic::{self, FrameParams, TrafficParams};

/// Everything that stays fixed while the decision variables move.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: RisGeometry,
    pub link: LinkScenario,
    pub noise: NoiseConfig,
    /// `T_h` (s).
    pub header_time: f64,
    /// `B` (Hz).
    pub bandwidth: f64,
    /// `n_d` (bits).
    pub payload_bits: u32,
    /// `Λ_k` (packets/s), one per user.
    pub arrival_rates: Vec<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        check_non_negative("header_time", self.header_time)?;
        check_positive("bandwidth", self.bandwidth)?;
        if self.payload_bits == 0 {
            return Err(Error::InvalidParameter { name: "payload_bits", value: 0.0 });
        }
        if self.arrival_rates.len() != self.link.user_count() {
            return Err(Error::LengthMismatch {
                what: "arrival rates",
                expected: self.link.user_count(),
                found: self.arrival_rates.len(),
            });
        }
        for &rate in &self.arrival_rates {
            check_positive("arrival_rate", rate)?;
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.link.user_count()
    }

    pub fn element_count(&self) -> usize {
        self.geometry.len()
    }
}

/// Per-user metrics of one configuration. Delays are `None` for unstable
/// queues, and the energy efficiency is `None` whenever any queue is unstable.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub sjnr: Vec<f64>,
    pub bler: Vec<f64>,
    pub replica_success: f64,
    pub reliability: Vec<f64>,
    pub utilization: Vec<f64>,
    pub mean_delay: Vec<Option<f64>>,
    pub energy_efficiency: Option<f64>,
}

impl MetricsReport {
    pub fn is_stable(&self) -> bool {
        self.mean_delay.iter().all(Option::is_some)
    }
}

/// A validated scenario with its channels synthesized once.
#[derive(Debug, Clone)]
pub struct SystemModel {
    scenario: Scenario,
    channels: Channels,
}

impl SystemModel {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let channels = Channels::synthesize(&scenario.geometry, &scenario.link)?;
        Ok(Self { scenario, channels })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn channels(&self) -> &Channels {
        &self.channels
    }

    /// Phases co-phased to user `k` (1-based).
    pub fn cophased(&self, k: usize) -> Result<Vec<f64>> {
        link::cophased_phases(&self.channels, k)
    }

    pub fn sjnr_all(&self, beam: &BeamformConfig, powers: &PowerAllocation) -> Result<Vec<f64>> {
        link::sjnr_all(&self.channels, beam, powers, self.scenario.link.jammer_power, &self.scenario.noise)
    }

    /// Runs the whole metric chain.
    pub fn metrics(
        &self,
        beam: &BeamformConfig,
        powers: &PowerAllocation,
        blocklength: u32,
        retransmissions: u32,
    ) -> Result<MetricsReport> {
        let s = &self.scenario;
        let code = FblCode::new(blocklength, s.payload_bits)?;
        let link = link::link_report(
            &self.channels,
            beam,
            powers,
            s.link.jammer_power,
            &s.noise,
            code,
            retransmissions,
        )?;
        let fp = FrameParams::new(s.header_time, s.bandwidth, blocklength)?;
        let tp = TrafficParams::new(s.arrival_rates.clone(), retransmissions)?;
        let users = s.user_count();
        let utilization = (1..=users)
            .map(|k| traffic::utilization(&fp, &tp, k))
            .collect::<Result<Vec<_>>>()?;
        let mean_delay: Vec<Option<f64>> = (1..=users)
            .map(|k| match traffic::mean_delay(&fp, &tp, k) {
                Ok(d) => Ok(Some(d)),
                Err(Error::UnstableQueue { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let energy_efficiency = match mean_delay.iter().copied().collect::<Option<Vec<f64>>>() {
            Some(delays) => Some(traffic::energy_efficiency(
                s.payload_bits,
                &link.reliability,
                powers,
                &delays,
            )?),
            None => None,
        };
        Ok(MetricsReport {
            sjnr: link.sjnr,
            bler: link.bler,
            replica_success: link.replica_success,
            reliability: link.reliability,
            utilization,
            mean_delay,
            energy_efficiency,
        })
    }
}
