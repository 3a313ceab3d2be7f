//! Gravitational redshift and Doppler phases of a satellite-to-ground
//! Franson link.

use serde::{Deserialize, Serialize};

use crate::constants::{PhysConstants, KM};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitPoint {
    /// Height above the surface (m).
    pub altitude: f64,
    /// m/s, positive receding.
    #[serde(default)]
    pub radial_velocity: f64,
}

impl OrbitPoint {
    pub fn at_altitude(altitude: f64) -> Self {
        Self {
            altitude,
            radial_velocity: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("altitude", self.altitude)?;
        if !self.radial_velocity.is_finite() {
            return Err(Error::invalid("radial_velocity", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedshiftConfig {
    /// Unbalanced optical-path difference of the interferometers (m).
    pub delta_l: f64,
    pub wavelength: f64,
}

impl RedshiftConfig {
    /// Spaceborne interferometers with a 50 m delay line.
    pub fn satellite() -> Self {
        Self {
            delta_l: 50.0,
            wavelength: 893.2e-9,
        }
    }

    /// The 1.2 m ground demonstrator.
    pub fn ground_demo() -> Self {
        Self {
            delta_l: 1.2,
            wavelength: 893.2e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("delta_l", self.delta_l)?;
        ensure_positive("wavelength", self.wavelength)
    }
}

/// A named configuration plus the orbit points it is evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedshiftScenario {
    pub name: String,
    pub config: RedshiftConfig,
    pub points: Vec<OrbitPoint>,
}

impl RedshiftScenario {
    pub const PRESETS: [&'static str; 2] = ["geo-50m", "elliptical-10k-20k"];

    pub fn preset(name: &str) -> Option<Self> {
        let points = match name {
            "geo-50m" => vec![OrbitPoint::at_altitude(36_000.0 * KM)],
            "elliptical-10k-20k" => vec![OrbitPoint::at_altitude(10_000.0 * KM), OrbitPoint::at_altitude(20_000.0 * KM)],
            _ => return None,
        };
        Some(Self {
            name: name.to_string(),
            config: RedshiftConfig::satellite(),
            points,
        })
    }
}

/// φ = (2π δl g / λc²) · R_e h / (R_e + h)
pub fn redshift_phase(cfg: &RedshiftConfig, p: &OrbitPoint) -> Result<f64> {
    redshift_phase_with(cfg, p, &PhysConstants::default())
}

pub fn redshift_phase_with(cfg: &RedshiftConfig, p: &OrbitPoint, k: &PhysConstants) -> Result<f64> {
    cfg.validate()?;
    p.validate()?;
    let re = k.earth_radius();
    Ok(scale(cfg, k) * re * p.altitude / (re + p.altitude))
}

/// Limit of [`redshift_phase`] as h → ∞.
pub fn redshift_asymptote(cfg: &RedshiftConfig) -> Result<f64> {
    cfg.validate()?;
    let k = PhysConstants::default();
    Ok(scale(cfg, &k) * k.earth_radius())
}

fn scale(cfg: &RedshiftConfig, k: &PhysConstants) -> f64 {
    std::f64::consts::TAU * cfg.delta_l * k.g() / (cfg.wavelength * k.c() * k.c())
}

/// φ(p2) − φ(p1).
pub fn redshift_phase_difference(cfg: &RedshiftConfig, p1: &OrbitPoint, p2: &OrbitPoint) -> Result<f64> {
    Ok(redshift_phase(cfg, p2)? - redshift_phase(cfg, p1)?)
}

/// φ = 2π δl v_r / (c λ)
pub fn doppler_phase(cfg: &RedshiftConfig, radial_velocity: f64) -> Result<f64> {
    cfg.validate()?;
    let c = PhysConstants::default().c();
    if !(radial_velocity.abs() < 1e-3 * c) {
        return Err(Error::invalid("radial_velocity", "must be finite and far below c"));
    }
    Ok(std::f64::consts::TAU * cfg.delta_l * radial_velocity / (c * cfg.wavelength))
}

/// Phase precision needed to see `signal` at `n_sigma` standard deviations.
pub fn precision_target(signal: f64, n_sigma: f64) -> Result<f64> {
    if !(n_sigma >= 1.0 && n_sigma.is_finite()) {
        return Err(Error::invalid("n_sigma", format!("must be >= 1, got {n_sigma}")));
    }
    ensure_non_negative("signal", signal.abs())?;
    Ok(signal / n_sigma)
}
