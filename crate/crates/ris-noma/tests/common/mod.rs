#![allow(dead_code)]

use ris_noma::{parse_config, ExperimentConfig};

/// Single user, one element, no jammer. The optimum sits at P = p_min,
/// β = β_max with integer n_b and 𝓛 inside a box the 20-point lattice covers
/// exactly, so the lattice maximum is the box maximum.
pub const TOY_CONFIG: &str = r#"
seed = 1

[geometry]
elements = 1

[scenario]
dist_ris_ue_m = [20.0]
user_azimuth_rad = [1.5707963267948966]
user_elevation_rad = [6.283185307179586]
jammer_power_mw = 0.0

[traffic]
arrival_rate_pps = 200.0

[fbl]
payload_bytes = 16
blocklength_min = 60
blocklength_max = 79

[ga]
preset = "desk"
beta_max = 4.0
p_min_mw = 2e-10
p_max_mw = 8e-10
l_max = 4

[sweep]
policy_user_powers_mw = [1.0]
cophase_user = 1
beta_stop = 4.0
"#;

/// max η over the 20⁵ lattice of (P, β, θ, n_b, 𝓛) on the toy box, computed
/// with an independent NumPy/SciPy implementation of the metric chain.
/// Attained at P = 2e-13 W, β = 4, n_b = 70, 𝓛 = 1.
pub const TOY_GRID_ETA: f64 = 1.4610461821785528e18;

pub fn toy_config() -> ExperimentConfig {
    parse_config(TOY_CONFIG).expect("toy config parses")
}

/// `count` points evenly spaced over `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
