use serde::{Deserialize, Serialize};

use crate::constants::wavenumber;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Plane-wave prefactor in r0^(−5/3) = prefactor · k² · L · Cn².
pub const PLANE_WAVE_FRIED_PREFACTOR: f64 = 0.423;

/// Phase noise per unit angle-of-incidence jitter with the field-widening
/// imaging system in place (0.3 mrad for 62 µrad RMS jitter).
pub const AOI_COUPLING: f64 = 0.3e-3 / 62e-6;
/// How much larger AOI phase noise is without the imaging system.
pub const IMAGING_SUPPRESSION: f64 = 183.0;

/// Beam-direction overlap offset per unit incident-angle change (0.04 mrad per 1.6 mrad).
pub const IMAGING_DIRECTION_GAIN: f64 = 0.04 / 1.6;
/// Beam-position overlap offset per unit incident-angle change (0.06 mm per 1.6 mrad), m/rad.
pub const IMAGING_POSITION_GAIN: f64 = 0.06e-3 / 1.6e-3;
const IMAGING_LINEAR_LIMIT: f64 = 10e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurbulenceParams {
    /// Refractive-index structure constant (m^(−2/3)).
    pub cn2: f64,
    pub fried_r0: f64,
    /// Transverse wind speed (m/s).
    pub wind_v: f64,
    pub path_len: f64,
    pub wavelength: f64,
}

impl TurbulenceParams {
    /// The 8.4 km urban link evaluated at the 893.2 nm photon wavelength,
    /// with the quoted Cn² = 4.5e-16 m^(−2/3) and 5 m/s wind.
    pub fn urban_link() -> Self {
        Self {
            cn2: 4.5e-16,
            fried_r0: 0.053,
            wind_v: 5.0,
            path_len: 8.4e3,
            wavelength: 893.2e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("cn2", self.cn2)?;
        ensure_positive("fried_r0", self.fried_r0)?;
        ensure_non_negative("wind_v", self.wind_v)?;
        ensure_positive("path_len", self.path_len)?;
        ensure_positive("wavelength", self.wavelength)
    }
}

pub fn cn2_from_fried(r0: f64, wavelength: f64, path_len: f64) -> Result<f64> {
    cn2_from_fried_with(r0, wavelength, path_len, PLANE_WAVE_FRIED_PREFACTOR)
}

/// Cn² = r0^(−5/3) / (prefactor · k² · L).
pub fn cn2_from_fried_with(r0: f64, wavelength: f64, path_len: f64, prefactor: f64) -> Result<f64> {
    ensure_positive("r0", r0)?;
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("path_len", path_len)?;
    ensure_positive("prefactor", prefactor)?;
    let k = wavenumber(wavelength);
    Ok(r0.powf(-5.0 / 3.0) / (prefactor * k * k * path_len))
}

pub fn fried_from_cn2(cn2: f64, wavelength: f64, path_len: f64) -> Result<f64> {
    fried_from_cn2_with(cn2, wavelength, path_len, PLANE_WAVE_FRIED_PREFACTOR)
}

pub fn fried_from_cn2_with(cn2: f64, wavelength: f64, path_len: f64, prefactor: f64) -> Result<f64> {
    ensure_positive("cn2", cn2)?;
    ensure_positive("wavelength", wavelength)?;
    ensure_positive("path_len", path_len)?;
    ensure_positive("prefactor", prefactor)?;
    let k = wavenumber(wavelength);
    Ok((prefactor * k * k * path_len * cn2).powf(-3.0 / 5.0))
}

/// Kolmogorov phase PSD for frozen turbulence:
/// S(f) = 0.016 · k² · L · Cn² · v^(5/3) · f^(−8/3), in rad²/Hz.
pub fn kolmogorov_psd(f: f64, p: &TurbulenceParams) -> Result<f64> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::invalid("f", format!("frequency must be > 0, got {f}")));
    }
    p.validate()?;
    let k = wavenumber(p.wavelength);
    Ok(0.016 * k * k * p.path_len * p.cn2 * p.wind_v.powf(5.0 / 3.0) * f.powf(-8.0 / 3.0))
}

/// Axial (arrival-time) phase noise above `f_min`, under two conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialNoise {
    /// sqrt(∫_{f_min}^∞ S(f) df) = sqrt(3/5 · f_min · S(f_min)).
    pub integrated_rms: f64,
    /// sqrt(f_min · S(f_min)).
    pub single_frequency_rms: f64,
}

pub fn axial_phase_noise(p: &TurbulenceParams, f_min: f64) -> Result<AxialNoise> {
    if f_min.is_infinite() && f_min > 0.0 {
        return Ok(AxialNoise {
            integrated_rms: 0.0,
            single_frequency_rms: 0.0,
        });
    }
    let s = kolmogorov_psd(f_min, p)?;
    Ok(AxialNoise {
        integrated_rms: (0.6 * f_min * s).sqrt(),
        single_frequency_rms: (f_min * s).sqrt(),
    })
}

/// Phase noise from angle-of-incidence jitter `sigma_theta` (rad RMS).
pub fn aoi_phase_noise(sigma_theta: f64, imaging_system: bool, coupling: f64) -> Result<f64> {
    ensure_non_negative("sigma_theta", sigma_theta)?;
    ensure_non_negative("coupling", coupling)?;
    let with_imaging = coupling * sigma_theta;
    Ok(if imaging_system {
        with_imaging
    } else {
        with_imaging * IMAGING_SUPPRESSION
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagingResponse {
    /// Direction overlap offset between the arms (rad).
    pub direction_offset: f64,
    /// Position overlap offset between the arms (m).
    pub position_offset: f64,
    /// False when |angle_change| is outside the calibrated linear range.
    pub linear_regime: bool,
}

/// Arm-overlap response of the field-widened UMI to an incident-angle change.
pub fn imaging_overlap_response(angle_change: f64) -> ImagingResponse {
    ImagingResponse {
        direction_offset: IMAGING_DIRECTION_GAIN * angle_change,
        position_offset: IMAGING_POSITION_GAIN * angle_change,
        linear_regime: angle_change.abs() < IMAGING_LINEAR_LIMIT,
    }
}
