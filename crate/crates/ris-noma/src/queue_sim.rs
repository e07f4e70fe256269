//! Discrete-event M/D/1 simulation used to check the closed-form delay.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::output::CsvRow;

/// Mean sojourn time of a FIFO queue with Poisson arrivals at `arrival_rate`
/// and deterministic service `service`, over `arrivals` customers.
///
/// Waiting times follow the Lindley recursion
/// `W_{n+1} = max(0, W_n + S − A_{n+1})`.
pub fn simulate_md1(service: f64, arrival_rate: f64, arrivals: usize, seed: u64) -> f64 {
    assert!(service > 0.0 && arrival_rate > 0.0 && arrivals > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = Exp::new(arrival_rate).expect("positive rate");
    let mut wait = 0.0_f64;
    let mut total = 0.0_f64;
    for i in 0..arrivals {
        if i > 0 {
            wait = (wait + service - gap.sample(&mut rng)).max(0.0);
        }
        total += wait + service;
    }
    total / arrivals as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub utilization: f64,
    pub service_s: f64,
    pub arrival_rate_pps: f64,
    pub analytic_delay_s: f64,
    pub simulated_delay_s: f64,
    pub relative_error: f64,
}

impl CsvRow for OracleRow {
    const HEADER: &'static [&'static str] = &[
        "utilization",
        "service_s",
        "arrival_rate_pps",
        "analytic_delay_s",
        "simulated_delay_s",
        "relative_error",
    ];
}

/// Simulates each utilization level with the given service time and compares
/// against the closed form.
pub fn md1_oracle(service: f64, utilizations: &[f64], arrivals: usize, seed: u64) -> Vec<OracleRow> {
    utilizations
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let rate = rho / service;
            let analytic = ris_noma_core::traffic::md1_sojourn(service, rate).expect("rho < 1");
            let simulated = simulate_md1(service, rate, arrivals, seed.wrapping_add(i as u64));
            OracleRow {
                utilization: rho,
                service_s: service,
                arrival_rate_pps: rate,
                analytic_delay_s: analytic,
                simulated_delay_s: simulated,
                relative_error: (simulated - analytic).abs() / analytic,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn light_load_approaches_service_time() {
        let d = simulate_md1(1.0, 1e-6, 10_000, 3);
        assert!((d - 1.0).abs() < 1e-3);
    }

    #[test]
    fn same_seed_same_estimate() {
        assert_eq!(simulate_md1(1e-3, 500.0, 5000, 7), simulate_md1(1e-3, 500.0, 5000, 7));
    }

    #[test]
    fn moderate_load_matches_closed_form() {
        let rows = md1_oracle(6.3e-4, &[0.5], 200_000, 11);
        assert!(rows[0].relative_error < 0.02, "{rows:?}");
    }
}
