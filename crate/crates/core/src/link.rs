//! Per-user SJNR under jamming with active-RIS noise, the finite-blocklength
//! block error rate, and packet reliability under blind repetition.

use alloc::vec::Vec;
use core::f64::consts::{LOG2_E, PI, SQRT_2};

use num_complex::Complex64;

use crate::channel::Channels;
use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::units;

/// Amplitudes `β_n` and phases `θ_n` of the active RIS (the diagonal of Θ).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformConfig {
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
}

impl BeamformConfig {
    pub fn new(amplitudes: Vec<f64>, phases: Vec<f64>, beta_max: f64) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::LengthMismatch {
                what: "beamforming phases",
                expected: amplitudes.len(),
                found: phases.len(),
            });
        }
        for &b in &amplitudes {
            check_non_negative("amplitude", b)?;
            if b > beta_max {
                return Err(Error::InvalidParameter { name: "amplitude", value: b });
            }
        }
        for &t in &phases {
            if !(0.0..=2.0 * PI).contains(&t) {
                return Err(Error::InvalidParameter { name: "phase", value: t });
            }
        }
        Ok(Self { amplitudes, phases })
    }

    /// Same amplitude on every element.
    pub fn uniform(beta: f64, phases: Vec<f64>, beta_max: f64) -> Result<Self> {
        let amplitudes = alloc::vec![beta; phases.len()];
        Self::new(amplitudes, phases, beta_max)
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Diagonal entry `√β_n·e^{jθ_n}` (0-based).
    pub fn coefficient(&self, idx: usize) -> Complex64 {
        libm::sqrt(self.amplitudes[idx]) * Complex64::cis(self.phases[idx])
    }
}

/// Phases that add every cascade term `I_n·G_{k,n}` of user `k` (1-based)
/// coherently: `θ_n = −arg(I_n·G_{k,n})`, wrapped into `[0, 2π)`.
pub fn cophased_phases(channels: &Channels, k: usize) -> Result<Vec<f64>> {
    let users = channels.user_count();
    if k == 0 || k > users {
        return Err(Error::IndexOutOfRange { what: "user", index: k, len: users });
    }
    Ok(channels
        .ris_bs
        .iter()
        .zip(channels.users[k - 1].iter())
        .map(|(i, g)| wrap_phase(-(i * g).arg()))
        .collect())
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let tau = 2.0 * PI;
    let w = theta - tau * libm::floor(theta / tau);
    if w >= tau {
        0.0
    } else {
        w
    }
}

/// Transmit powers of the users in SIC decoding order (W).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    user_powers: Vec<f64>,
}

impl PowerAllocation {
    /// Every power must be finite and strictly positive.
    pub fn new(user_powers: Vec<f64>) -> Result<Self> {
        if user_powers.is_empty() {
            return Err(Error::InvalidParameter { name: "user_count", value: 0.0 });
        }
        for &p in &user_powers {
            check_positive("user_power", p)?;
        }
        Ok(Self { user_powers })
    }

    pub fn powers(&self) -> &[f64] {
        &self.user_powers
    }

    pub fn len(&self) -> usize {
        self.user_powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.user_powers.is_empty()
    }

    /// `P_k ≤ P_{k+1}` for every consecutive pair.
    pub fn is_sic_ordered(&self) -> bool {
        self.user_powers.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn within_budget(&self, p_max: f64) -> bool {
        self.user_powers.iter().all(|&p| p <= p_max)
    }
}

/// Noise variances in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Thermal noise of each active element, `σ_υ²`.
    pub ris_thermal_var: f64,
    /// AWGN at the base station, `σ²`.
    pub awgn_var: f64,
}

impl NoiseConfig {
    pub fn new(ris_thermal_var: f64, awgn_var: f64) -> Result<Self> {
        check_non_negative("ris_thermal_var", ris_thermal_var)?;
        check_non_negative("awgn_var", awgn_var)?;
        Ok(Self { ris_thermal_var, awgn_var })
    }

    pub fn from_dbm(ris_thermal_dbm: f64, awgn_dbm: f64) -> Result<Self> {
        Self::new(units::dbm_to_watts(ris_thermal_dbm), units::dbm_to_watts(awgn_dbm))
    }
}

/// Finite-blocklength code: `blocklength` channel uses carrying `payload_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FblCode {
    pub blocklength: u32,
    pub payload_bits: u32,
}

impl FblCode {
    pub fn new(blocklength: u32, payload_bits: u32) -> Result<Self> {
        if blocklength == 0 {
            return Err(Error::InvalidParameter { name: "blocklength", value: 0.0 });
        }
        if payload_bits == 0 {
            return Err(Error::InvalidParameter { name: "payload_bits", value: 0.0 });
        }
        Ok(Self { blocklength, payload_bits })
    }

    /// Coding rate in bits per channel use.
    pub fn rate(&self) -> f64 {
        self.payload_bits as f64 / self.blocklength as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub sjnr: Vec<f64>,
    pub bler: Vec<f64>,
    pub replica_success: f64,
    pub reliability: Vec<f64>,
}

/// Per-configuration cascade terms shared by every user's SJNR.
struct Cascade {
    user_gain: Vec<f64>,
    jammer_gain: f64,
    row_norm_sq: f64,
}

impl Cascade {
    fn new(channels: &Channels, beam: &BeamformConfig) -> Result<Self> {
        let n = channels.element_count();
        let mismatch = |what, found| Error::LengthMismatch { what, expected: n, found };
        if beam.len() != n {
            return Err(mismatch("beamforming config", beam.len()));
        }
        if channels.ris_jammer.len() != n {
            return Err(mismatch("RIS-jammer channel", channels.ris_jammer.len()));
        }
        if let Some(g) = channels.users.iter().find(|g| g.len() != n) {
            return Err(mismatch("RIS-UE channel", g.len()));
        }
        // Row vector IᵀΘ.
        let row: Vec<Complex64> = channels
            .ris_bs
            .iter()
            .enumerate()
            .map(|(idx, i)| i * beam.coefficient(idx))
            .collect();
        let project = |g: &[Complex64]| -> Complex64 { row.iter().zip(g).map(|(r, g)| r * g).sum() };
        Ok(Self {
            user_gain: channels.users.iter().map(|g| project(g).norm_sqr()).collect(),
            jammer_gain: (channels.jammer_direct + project(&channels.ris_jammer)).norm_sqr(),
            row_norm_sq: row.iter().map(|r| r.norm_sqr()).sum(),
        })
    }

    fn sjnr(&self, powers: &[f64], jammer_power: f64, noise: &NoiseConfig, k: usize) -> Result<f64> {
        let signal = powers[k] * self.user_gain[k];
        let sic: f64 = powers[k + 1..]
            .iter()
            .zip(&self.user_gain[k + 1..])
            .map(|(p, g)| p * g)
            .sum();
        let denom = sic
            + jammer_power * self.jammer_gain
            + self.row_norm_sq * noise.ris_thermal_var
            + noise.awgn_var;
        if denom > 0.0 {
            Ok(signal / denom)
        } else if signal == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::InvalidParameter { name: "sjnr_denominator", value: denom })
        }
    }
}

/// SJNR of user `k` (1-based). Users `k+1..=K` are still undecoded and act as
/// interference; users before `k` have been cancelled.
pub fn sjnr(
    channels: &Channels,
    beam: &BeamformConfig,
    powers: &PowerAllocation,
    jammer_power: f64,
    noise: &NoiseConfig,
    k: usize,
) -> Result<f64> {
    let users = channels.user_count();
    if k == 0 || k > users {
        return Err(Error::IndexOutOfRange { what: "user", index: k, len: users });
    }
    if powers.len() != users {
        return Err(Error::LengthMismatch { what: "user powers", expected: users, found: powers.len() });
    }
    Cascade::new(channels, beam)?.sjnr(powers.powers(), jammer_power, noise, k - 1)
}

/// SJNR of every user, computing the cascade once.
pub fn sjnr_all(
    channels: &Channels,
    beam: &BeamformConfig,
    powers: &PowerAllocation,
    jammer_power: f64,
    noise: &NoiseConfig,
) -> Result<Vec<f64>> {
    let users = channels.user_count();
    if powers.len() != users {
        return Err(Error::LengthMismatch { what: "user powers", expected: users, found: powers.len() });
    }
    let cascade = Cascade::new(channels, beam)?;
    (0..users)
        .map(|k| cascade.sjnr(powers.powers(), jammer_power, noise, k))
        .collect()
}

/// Gaussian tail probability `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Shannon capacity `log₂(1+γ)`.
pub fn capacity(gamma: f64) -> f64 {
    if gamma < 1e-4 {
        libm::log1p(gamma) * LOG2_E
    } else {
        libm::log2(1.0 + gamma)
    }
}

/// Channel dispersion `(1 − (1+γ)^−2)·(log₂e)²`.
pub fn dispersion(gamma: f64) -> f64 {
    let one_plus = 1.0 + gamma;
    gamma * (2.0 + gamma) / (one_plus * one_plus) * LOG2_E * LOG2_E
}

/// Normal-approximation block error rate. Zero SJNR carries nothing, so
/// the error rate is one there.
pub fn bler(gamma: f64, code: FblCode) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidParameter { name: "sjnr", value: gamma });
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    if gamma == f64::INFINITY {
        return Ok(0.0);
    }
    let n_b = code.blocklength as f64;
    let arg = libm::sqrt(n_b / dispersion(gamma)) * (capacity(gamma) - code.rate());
    Ok(q_function(arg))
}

/// Probability that one replica of every user's packet decodes under SIC.
pub fn replica_success(blers: &[f64]) -> f64 {
    blers.iter().map(|e| 1.0 - e).product()
}

/// `1 − (1 − ω_s)^𝓛`.
pub fn reliability(omega_s: f64, retransmissions: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&omega_s) {
        return Err(Error::InvalidParameter { name: "replica_success", value: omega_s });
    }
    match retransmissions {
        0 => Err(Error::InvalidParameter { name: "retransmissions", value: 0.0 }),
        1 => Ok(omega_s),
        l => Ok(-libm::expm1(l as f64 * libm::log1p(-omega_s))),
    }
}

/// SJNR through reliability for every user.
pub fn link_report(
    channels: &Channels,
    beam: &BeamformConfig,
    powers: &PowerAllocation,
    jammer_power: f64,
    noise: &NoiseConfig,
    code: FblCode,
    retransmissions: u32,
) -> Result<LinkReport> {
    let sjnr = sjnr_all(channels, beam, powers, jammer_power, noise)?;
    let bler = sjnr.iter().map(|&g| bler(g, code)).collect::<Result<Vec<_>>>()?;
    let replica_success = replica_success(&bler);
    let rel = reliability(replica_success, retransmissions)?;
    let reliability = alloc::vec![rel; sjnr.len()];
    Ok(LinkReport { sjnr, bler, replica_success, reliability })
}
