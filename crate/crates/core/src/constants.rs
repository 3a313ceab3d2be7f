//! Physical constants and the SI-unit conventions shared by every module.
//!
//! All computation is in SI (m, s, rad, Hz, K). Display layers convert to
//! mrad, nm, dB and µrad through the helpers at the bottom of this file.

use crate::error::{ensure_positive, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Surface gravity used for the redshift phase (m/s²).
pub const STANDARD_GRAVITY: f64 = 9.8;
/// Mean Earth radius (m).
pub const EARTH_RADIUS: f64 = 6.371e6;
/// Radiation constant for the `C0 · (T/100)^4` form of the Stefan-Boltzmann
/// law (W/m²), i.e. σ · 10⁸.
pub const RADIATION_CONSTANT: f64 = 5.67;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    c: f64,
    g: f64,
    earth_radius: f64,
    radiation_c0: f64,
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            g: STANDARD_GRAVITY,
            earth_radius: EARTH_RADIUS,
            radiation_c0: RADIATION_CONSTANT,
        }
    }
}

impl PhysConstants {
    pub fn new(c: f64, g: f64, earth_radius: f64, radiation_c0: f64) -> Result<Self> {
        ensure_positive("c", c)?;
        ensure_positive("g", g)?;
        ensure_positive("earth_radius", earth_radius)?;
        ensure_positive("radiation_c0", radiation_c0)?;
        Ok(Self {
            c,
            g,
            earth_radius,
            radiation_c0,
        })
    }

    /// Same constants with a different surface gravity (e.g. 9.80665).
    pub fn with_gravity(self, g: f64) -> Result<Self> {
        Self::new(self.c, g, self.earth_radius, self.radiation_c0)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn earth_radius(&self) -> f64 {
        self.earth_radius
    }

    pub fn radiation_c0(&self) -> f64 {
        self.radiation_c0
    }
}

pub const MRAD: f64 = 1e-3;
pub const URAD: f64 = 1e-6;
pub const NM: f64 = 1e-9;
pub const KM: f64 = 1e3;
pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const SECONDS_PER_HOUR: f64 = 3_600.0;
pub const ZERO_CELSIUS: f64 = 273.15;

pub fn to_mrad(rad: f64) -> f64 {
    rad / MRAD
}

pub fn to_urad(rad: f64) -> f64 {
    rad / URAD
}

pub fn celsius_to_kelvin(t: f64) -> f64 {
    t + ZERO_CELSIUS
}

pub fn kelvin_to_celsius(t: f64) -> f64 {
    t - ZERO_CELSIUS
}

/// Wave number k = 2π/λ.
pub fn wavenumber(wavelength: f64) -> f64 {
    std::f64::consts::TAU / wavelength
}

/// Wavelength excursion corresponding to an optical-frequency excursion:
/// Δλ = λ²Δν/c.
pub fn frequency_to_wavelength_shift(wavelength: f64, delta_nu: f64) -> f64 {
    wavelength * wavelength * delta_nu / SPEED_OF_LIGHT
}
