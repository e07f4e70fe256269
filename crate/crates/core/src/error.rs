use core::fmt;

/// Errors raised by the physical models and the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A geometry or scenario parameter is outside its valid domain.
    InvalidParameter { name: &'static str, value: f64 },
    /// A 1-based index (element or user) does not exist.
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    /// Two vectors that must share a length do not.
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    /// Queue utilisation is at or above one, so the mean delay diverges.
    UnstableQueue { rho: f64 },
    /// Energy-efficiency denominator is zero or not finite.
    ZeroEnergy,
    /// Population size of zero or an elite count that does not fit.
    InvalidSettings(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for `{name}`")
            }
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range 1..={len}")
            }
            Error::LengthMismatch { what, expected, found } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
            Error::UnstableQueue { rho } => {
                write!(f, "queue is unstable (utilisation {rho} >= 1)")
            }
            Error::ZeroEnergy => f.write_str("consumed energy is zero or not finite"),
            Error::InvalidSettings(msg) => write!(f, "invalid GA settings: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
