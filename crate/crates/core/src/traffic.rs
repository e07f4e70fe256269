//! Frame timing, M/D/1 queueing under blind repetition, and energy efficiency.
//!
//! One service is all `𝓛` replicas back to back, so the deterministic service
//! time is `𝓛·T_f` and utilisation is `ρ = 𝓛·T_f·Λ`.

use alloc::vec::Vec;

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::link::PowerAllocation;

/// Stability margin: a queue counts as stable only while `ρ ≤ 1 − STRICT_MARGIN`.
pub const STRICT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameParams {
    /// Header duration `T_h` (s).
    pub header_time: f64,
    /// Bandwidth `B` (Hz).
    pub bandwidth: f64,
    /// Payload length in channel uses.
    pub blocklength: u32,
}

impl FrameParams {
    pub fn new(header_time: f64, bandwidth: f64, blocklength: u32) -> Result<Self> {
        check_non_negative("header_time", header_time)?;
        check_positive("bandwidth", bandwidth)?;
        if blocklength == 0 {
            return Err(Error::InvalidParameter { name: "blocklength", value: 0.0 });
        }
        Ok(Self { header_time, bandwidth, blocklength })
    }

    /// `T_p = n_b / B`.
    pub fn payload_time(&self) -> f64 {
        self.blocklength as f64 / self.bandwidth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    /// Poisson arrival rate of each user (packets/s).
    pub arrival_rates: Vec<f64>,
    /// Number of blind replicas per packet.
    pub retransmissions: u32,
}

impl TrafficParams {
    pub fn new(arrival_rates: Vec<f64>, retransmissions: u32) -> Result<Self> {
        if arrival_rates.is_empty() {
            return Err(Error::InvalidParameter { name: "user_count", value: 0.0 });
        }
        for &rate in &arrival_rates {
            check_positive("arrival_rate", rate)?;
        }
        if retransmissions == 0 {
            return Err(Error::InvalidParameter { name: "retransmissions", value: 0.0 });
        }
        Ok(Self { arrival_rates, retransmissions })
    }

    fn rate(&self, k: usize) -> Result<f64> {
        let len = self.arrival_rates.len();
        if k == 0 || k > len {
            return Err(Error::IndexOutOfRange { what: "user", index: k, len });
        }
        Ok(self.arrival_rates[k - 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayReport {
    pub utilization: Vec<f64>,
    pub mean_delay: Vec<f64>,
    pub energy_efficiency: f64,
}

/// `T_f = T_h + n_b/B`.
pub fn frame_duration(fp: &FrameParams) -> f64 {
    fp.header_time + fp.payload_time()
}

/// Utilisation `ρ_k = 𝓛·T_f·Λ_k` of user `k` (1-based). Values at or above
/// one are returned as-is.
pub fn utilization(fp: &FrameParams, tp: &TrafficParams, k: usize) -> Result<f64> {
    Ok(tp.retransmissions as f64 * frame_duration(fp) * tp.rate(k)?)
}

/// Mean sojourn time of an M/D/1 queue with deterministic service `service`.
pub fn md1_sojourn(service: f64, arrival_rate: f64) -> Result<f64> {
    let rho = service * arrival_rate;
    if !(rho < 1.0) {
        return Err(Error::UnstableQueue { rho });
    }
    Ok(service * (2.0 - rho) / (2.0 * (1.0 - rho)))
}

/// Mean packet delay of user `k`: queueing plus the `𝓛` replica airtime.
pub fn mean_delay(fp: &FrameParams, tp: &TrafficParams, k: usize) -> Result<f64> {
    let service = tp.retransmissions as f64 * frame_duration(fp);
    md1_sojourn(service, tp.rate(k)?)
}

/// Successfully delivered bits per joule of user transmit energy.
pub fn energy_efficiency(
    payload_bits: u32,
    reliabilities: &[f64],
    powers: &PowerAllocation,
    delays: &[f64],
) -> Result<f64> {
    let k = powers.len();
    for (what, len) in [("reliabilities", reliabilities.len()), ("delays", delays.len())] {
        if len != k {
            return Err(Error::LengthMismatch { what, expected: k, found: len });
        }
    }
    let energy: f64 = powers.powers().iter().zip(delays).map(|(p, d)| p * d).sum();
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let bits = payload_bits as f64 * reliabilities.iter().sum::<f64>();
    Ok(bits / energy)
}

/// Utilisation, delay and energy efficiency for every user; fails on the
/// first unstable queue.
pub fn delay_report(
    fp: &FrameParams,
    tp: &TrafficParams,
    payload_bits: u32,
    reliabilities: &[f64],
    powers: &PowerAllocation,
) -> Result<DelayReport> {
    let users = tp.arrival_rates.len();
    let utilization = (1..=users).map(|k| utilization(fp, tp, k)).collect::<Result<Vec<_>>>()?;
    let mean_delay = (1..=users).map(|k| mean_delay(fp, tp, k)).collect::<Result<Vec<_>>>()?;
    let energy_efficiency = energy_efficiency(payload_bits, reliabilities, powers, &mean_delay)?;
    Ok(DelayReport { utilization, mean_delay, energy_efficiency })
}
