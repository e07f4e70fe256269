//! Uniform planar RIS geometry and the deterministic line-of-sight channels
//! between the users, the jammer, the RIS and the base station.
//!
//! Element `n` (1-based, row by row) sits at `[0, i_R·d_W, i_C·d_H]` with
//! `i_R = (n-1) mod N_R` and `i_C = (n-1) div N_R`. Element widths already
//! carry the wavelength, so positions are physical metres.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Deref;

use num_complex::Complex64;

use crate::error::{check_finite, check_non_negative, check_positive, Error, Result};
use crate::units;

pub type Vec3 = [f64; 3];

/// Planar array layout of the RIS.
#[derive(Debug, Clone, PartialEq)]
pub struct RisGeometry {
    n_rows: usize,
    n_cols: usize,
    spacing_h: f64,
    spacing_v: f64,
    carrier_freq: f64,
}

impl RisGeometry {
    /// `spacing_h`/`spacing_v` are fractions of the wavelength.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        spacing_h: f64,
        spacing_v: f64,
        carrier_freq: f64,
    ) -> Result<Self> {
        if n_rows == 0 {
            return Err(Error::InvalidParameter { name: "n_rows", value: 0.0 });
        }
        if n_cols == 0 {
            return Err(Error::InvalidParameter { name: "n_cols", value: 0.0 });
        }
        check_positive("spacing_h", spacing_h)?;
        check_positive("spacing_v", spacing_v)?;
        check_positive("carrier_freq", carrier_freq)?;
        Ok(Self { n_rows, n_cols, spacing_h, spacing_v, carrier_freq })
    }

    /// Square `side × side` array.
    pub fn square(side: usize, spacing: f64, carrier_freq: f64) -> Result<Self> {
        Self::new(side, side, spacing, spacing, carrier_freq)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn spacing_h(&self) -> f64 {
        self.spacing_h
    }

    pub fn spacing_v(&self) -> f64 {
        self.spacing_v
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    /// Total element count `N = N_R·N_C`.
    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn wavelength(&self) -> f64 {
        units::wavelength(self.carrier_freq)
    }

    pub fn element_width(&self) -> f64 {
        self.spacing_h * self.wavelength()
    }

    pub fn element_height(&self) -> f64 {
        self.spacing_v * self.wavelength()
    }

    pub fn element_area(&self) -> f64 {
        self.element_width() * self.element_height()
    }

    /// Row/column grid indices `(i_R, i_C)` of 1-based element `n`.
    pub fn grid_index(&self, n: usize) -> Result<(usize, usize)> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange { what: "element", index: n, len: self.len() });
        }
        Ok(((n - 1) % self.n_rows, (n - 1) / self.n_rows))
    }
}

/// Azimuth/elevation pair in radians. Any finite value is accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Direction {
    pub const fn new(azimuth: f64, elevation: f64) -> Self {
        Self { azimuth, elevation }
    }
}

/// Per-element complex gains of one RIS link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(Vec<Complex64>);

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for ChannelVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Large-scale parameters of every link in the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    /// Path gain at the 1 m reference distance (linear).
    pub path_gain_ref: f64,
    pub path_loss_exp: f64,
    pub dist_ris_bs: f64,
    /// One distance per user.
    pub dist_ris_ue: Vec<f64>,
    /// Jammer to base-station distance.
    pub dist_jammer: f64,
    /// RIS to jammer distance; the jammer-BS distance is reused when unset.
    pub dist_ris_jammer: Option<f64>,
    pub dir_bs: Direction,
    pub dir_jammer: Direction,
    pub dir_users: Vec<Direction>,
    /// Jammer transmit power (W).
    pub jammer_power: f64,
}

impl LinkScenario {
    pub fn validate(&self) -> Result<()> {
        check_positive("path_gain_ref", self.path_gain_ref)?;
        check_non_negative("path_loss_exp", self.path_loss_exp)?;
        check_positive("dist_ris_bs", self.dist_ris_bs)?;
        check_positive("dist_jammer", self.dist_jammer)?;
        if let Some(d) = self.dist_ris_jammer {
            check_positive("dist_ris_jammer", d)?;
        }
        check_non_negative("jammer_power", self.jammer_power)?;
        if self.dist_ris_ue.is_empty() {
            return Err(Error::InvalidParameter { name: "user_count", value: 0.0 });
        }
        if self.dir_users.len() != self.dist_ris_ue.len() {
            return Err(Error::LengthMismatch {
                what: "user directions",
                expected: self.dist_ris_ue.len(),
                found: self.dir_users.len(),
            });
        }
        for &d in &self.dist_ris_ue {
            check_positive("dist_ris_ue", d)?;
        }
        for dir in self
            .dir_users
            .iter()
            .chain([&self.dir_bs, &self.dir_jammer])
        {
            check_finite("azimuth", dir.azimuth)?;
            check_finite("elevation", dir.elevation)?;
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.dist_ris_ue.len()
    }

    pub fn ris_jammer_distance(&self) -> f64 {
        self.dist_ris_jammer.unwrap_or(self.dist_jammer)
    }

    /// `√(L·d^(−δ))` for a link of length `d`.
    pub fn amplitude(&self, distance: f64) -> f64 {
        libm::sqrt(self.path_gain_ref * libm::pow(distance, -self.path_loss_exp))
    }
}

/// Position of 1-based element `n` in metres.
pub fn element_position(geom: &RisGeometry, n: usize) -> Result<Vec3> {
    let (i_r, i_c) = geom.grid_index(n)?;
    Ok([
        0.0,
        i_r as f64 * geom.element_width(),
        i_c as f64 * geom.element_height(),
    ])
}

/// Wave vector of a plane wave arriving from `dir`; its norm is `2π/λ`.
pub fn wave_vector(dir: Direction, wavelength: f64) -> Result<Vec3> {
    check_finite("azimuth", dir.azimuth)?;
    check_finite("elevation", dir.elevation)?;
    check_positive("wavelength", wavelength)?;
    let k = 2.0 * PI / wavelength;
    let (sin_a, cos_a) = libm::sincos(dir.azimuth);
    let (sin_e, cos_e) = libm::sincos(dir.elevation);
    Ok([k * cos_a * cos_e, k * sin_a * cos_e, k * sin_e])
}

/// Unit-modulus array response, entry `n` is `exp(j·ζᵀu_n)`.
pub fn array_response(geom: &RisGeometry, dir: Direction) -> Result<ChannelVector> {
    let zeta = wave_vector(dir, geom.wavelength())?;
    (1..=geom.len())
        .map(|n| {
            let u = element_position(geom, n)?;
            let phase = zeta[0] * u[0] + zeta[1] * u[1] + zeta[2] * u[2];
            Ok(Complex64::cis(phase))
        })
        .collect::<Result<Vec<_>>>()
        .map(ChannelVector)
}

/// `exp(−j·2πd/λ)`, reduced modulo whole wavelengths first.
fn propagation_phase(distance: f64, wavelength: f64) -> Complex64 {
    let cycles = distance / wavelength;
    let frac = cycles - libm::floor(cycles);
    Complex64::cis(-2.0 * PI * frac)
}

fn steered_channel(
    geom: &RisGeometry,
    scen: &LinkScenario,
    distance: f64,
    dir: Direction,
) -> Result<ChannelVector> {
    let scale = scen.amplitude(distance) * propagation_phase(distance, geom.wavelength());
    let mut a = array_response(geom, dir)?;
    for e in a.0.iter_mut() {
        *e *= scale;
    }
    Ok(a)
}

/// RIS to user `k` (1-based) channel `G_k`.
pub fn ris_ue_channel(geom: &RisGeometry, scen: &LinkScenario, k: usize) -> Result<ChannelVector> {
    let n_users = scen.user_count();
    if k == 0 || k > n_users || k > scen.dir_users.len() {
        return Err(Error::IndexOutOfRange { what: "user", index: k, len: n_users });
    }
    let d = check_positive("dist_ris_ue", scen.dist_ris_ue[k - 1])?;
    steered_channel(geom, scen, d, scen.dir_users[k - 1])
}

/// RIS to base-station channel `I`.
pub fn ris_bs_channel(geom: &RisGeometry, scen: &LinkScenario) -> Result<ChannelVector> {
    let d = check_positive("dist_ris_bs", scen.dist_ris_bs)?;
    steered_channel(geom, scen, d, scen.dir_bs)
}

/// Direct jammer to base-station scalar channel `h_j`.
pub fn jammer_direct_channel(geom: &RisGeometry, scen: &LinkScenario) -> Result<Complex64> {
    let d = check_positive("dist_jammer", scen.dist_jammer)?;
    Ok(scen.amplitude(d) * propagation_phase(d, geom.wavelength()))
}

/// RIS to jammer channel `G_j`.
pub fn ris_jammer_channel(geom: &RisGeometry, scen: &LinkScenario) -> Result<ChannelVector> {
    let d = check_positive("dist_ris_jammer", scen.ris_jammer_distance())?;
    steered_channel(geom, scen, d, scen.dir_jammer)
}

/// Every channel needed to evaluate the SJNR of all users.
#[derive(Debug, Clone, PartialEq)]
pub struct Channels {
    pub users: Vec<ChannelVector>,
    pub ris_bs: ChannelVector,
    pub jammer_direct: Complex64,
    pub ris_jammer: ChannelVector,
}

impl Channels {
    pub fn synthesize(geom: &RisGeometry, scen: &LinkScenario) -> Result<Self> {
        scen.validate()?;
        let users = (1..=scen.user_count())
            .map(|k| ris_ue_channel(geom, scen, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            users,
            ris_bs: ris_bs_channel(geom, scen)?,
            jammer_direct: jammer_direct_channel(geom, scen)?,
            ris_jammer: ris_jammer_channel(geom, scen)?,
        })
    }

    pub fn element_count(&self) -> usize {
        self.ris_bs.len()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }
}
