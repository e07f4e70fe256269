//! Unit conversions. Everything downstream works in linear SI units.

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Power ratio in dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * libm::log10(watts) + 30.0
}

/// Carrier frequency (Hz) to wavelength (m).
pub fn wavelength(carrier_freq: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_freq
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(db_to_linear(30.0), 1000.0);
        assert!((dbm_to_watts(-100.0) - 1e-13).abs() < 1e-27);
        assert!((dbm_to_watts(watts_to_dbm(5e-3)) - 5e-3).abs() < 1e-15);
        assert!((wavelength(28e9) - 0.010_706_873_5).abs() < 1e-10);
    }
}
