//! Analytic phase-noise sources and their combination into a budget.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channel::{aoi_phase_noise, axial_phase_noise, TurbulenceParams, AOI_COUPLING};
use crate::constants::{frequency_to_wavelength_shift, RADIATION_CONSTANT, SECONDS_PER_DAY, SPEED_OF_LIGHT};
use crate::detection::{shot_noise_phase, spad_inconsistency_noise, DetectionScheme, DUAL_SPAD_NOISE_PER_CV};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Refractive index change of air per pascal near standard conditions.
pub const AIR_REFRACTIVITY_PER_PA: f64 = 2.68e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// RMS phase (rad).
    StaticRms,
    /// Phase drift (rad/s).
    DriftRate,
}

impl NoiseKind {
    fn label(self) -> &'static str {
        match self {
            NoiseKind::StaticRms => "static RMS",
            NoiseKind::DriftRate => "drift rate",
        }
    }
}

/// Unit a source is reported in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplayUnit {
    Mrad,
    MradPerDay,
    MradPerSecond,
    MradPerSecondPerKelvin,
}

impl DisplayUnit {
    pub fn label(self) -> &'static str {
        match self {
            DisplayUnit::Mrad => "mrad",
            DisplayUnit::MradPerDay => "mrad/day",
            DisplayUnit::MradPerSecond => "mrad/s",
            DisplayUnit::MradPerSecondPerKelvin => "mrad/s/K",
        }
    }

    /// Factor from SI (rad or rad/s) to this unit.
    pub fn scale(self) -> f64 {
        match self {
            DisplayUnit::MradPerDay => 1e3 * SECONDS_PER_DAY,
            _ => 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSource {
    pub name: String,
    /// rad for static entries, rad/s for drift entries.
    pub magnitude: f64,
    pub kind: NoiseKind,
    pub unit: DisplayUnit,
    /// Decimal places shown in the table.
    pub decimals: usize,
}

impl NoiseSource {
    pub fn static_rms(name: impl Into<String>, rad: f64) -> Self {
        Self {
            name: name.into(),
            magnitude: rad,
            kind: NoiseKind::StaticRms,
            unit: DisplayUnit::Mrad,
            decimals: 1,
        }
    }

    pub fn drift(name: impl Into<String>, rad_per_s: f64, unit: DisplayUnit) -> Self {
        Self {
            name: name.into(),
            magnitude: rad_per_s,
            kind: NoiseKind::DriftRate,
            unit,
            decimals: 3,
        }
    }

    pub fn with_decimals(mut self, decimals: usize) -> Self {
        self.decimals = decimals;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("magnitude", self.magnitude)?;
        let ok = match self.kind {
            NoiseKind::StaticRms => self.unit == DisplayUnit::Mrad,
            NoiseKind::DriftRate => self.unit != DisplayUnit::Mrad,
        };
        if !ok {
            return Err(Error::invalid("unit", format!("{} does not fit a {} source", self.unit.label(), self.kind.label())));
        }
        Ok(())
    }

    /// Magnitude in `unit`.
    pub fn display_value(&self) -> f64 {
        self.magnitude * self.unit.scale()
    }

    /// Magnitude in `unit`, rounded to `decimals`.
    pub fn display_rounded(&self) -> f64 {
        let p = 10f64.powi(self.decimals as i32);
        (self.display_value() * p).round() / p
    }

    pub fn formatted(&self) -> String {
        format!("{:.*} {}", self.decimals, self.display_value(), self.unit.label())
    }
}

/// sqrt(Σ m²) over sources of one kind.
pub fn quadrature_sum(sources: &[NoiseSource]) -> Result<f64> {
    let first = sources.first().ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    let mut acc = 0.0;
    for s in sources {
        s.validate()?;
        if s.kind != first.kind {
            return Err(Error::MixedKinds(first.kind.label(), s.kind.label()));
        }
        acc += s.magnitude * s.magnitude;
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub sources: Vec<NoiseSource>,
    /// Quadrature total of the static entries (rad); `None` when every
    /// entry is a drift rate.
    pub quadrature_total: Option<f64>,
}

impl NoiseBudget {
    pub fn to_table(&self) -> String {
        let header = ("Noise source", "Corresponding phase noise");
        let w = self
            .sources
            .iter()
            .map(|s| s.name.chars().count())
            .chain([header.0.len(), "Quadrature total (static)".len()])
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{:<w$}  {}", header.0, header.1);
        let _ = writeln!(out, "{}", "-".repeat(w + 2 + header.1.len()));
        for s in &self.sources {
            let _ = writeln!(out, "{:<w$}  {}", s.name, s.formatted());
        }
        if let Some(total) = self.quadrature_total {
            let _ = writeln!(out, "{}", "-".repeat(w + 2 + header.1.len()));
            let _ = writeln!(out, "{:<w$}  {:.1} mrad", "Quadrature total (static)", total * 1e3);
        }
        out
    }

    /// `source,magnitude,unit` rows in display units.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source,magnitude,unit\n");
        for s in &self.sources {
            let name = if s.name.contains([',', '"']) {
                format!("\"{}\"", s.name.replace('"', "\"\""))
            } else {
                s.name.clone()
            };
            let _ = writeln!(out, "{},{},{}", name, s.display_value(), s.unit.label());
        }
        out
    }
}

/// Collects the sources in order; drift entries are listed but never summed.
pub fn assemble_budget(sources: Vec<NoiseSource>) -> Result<NoiseBudget> {
    if sources.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for s in &sources {
        s.validate()?;
    }
    let statics: Vec<NoiseSource> = sources.iter().filter(|s| s.kind == NoiseKind::StaticRms).cloned().collect();
    let quadrature_total = if statics.is_empty() {
        None
    } else {
        Some(quadrature_sum(&statics)?)
    };
    Ok(NoiseBudget {
        sources,
        quadrature_total,
    })
}

/// Δφ = 2π·δl·Δλ/λ².
pub fn center_wavelength_noise(arm_mismatch: f64, delta_lambda: f64, wavelength: f64) -> Result<f64> {
    ensure_non_negative("arm_mismatch", arm_mismatch)?;
    ensure_non_negative("delta_lambda", delta_lambda)?;
    ensure_positive("wavelength", wavelength)?;
    Ok(std::f64::consts::TAU * arm_mismatch * delta_lambda / (wavelength * wavelength))
}

/// Δφ = 2π·δl·(dn/dP)·σP/λ.
pub fn air_pressure_noise(pressure_std: f64, arm_diff: f64, wavelength: f64, refractivity_coeff: f64) -> Result<f64> {
    ensure_non_negative("pressure_std", pressure_std)?;
    ensure_non_negative("arm_diff", arm_diff)?;
    ensure_positive("wavelength", wavelength)?;
    ensure_non_negative("refractivity_coeff", refractivity_coeff)?;
    Ok(std::f64::consts::TAU * arm_diff * refractivity_coeff * pressure_std / wavelength)
}

/// Heat paths into the interferometer bench: conduction through the support
/// pillars and radiative exchange with the enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalParams {
    /// W/(m·K)
    pub k_cond: f64,
    /// Pillar cross-section (m²).
    pub a1: f64,
    /// Pillar length (m).
    pub h_pillar: f64,
    /// Substrate CTE (1/K).
    pub alpha: f64,
    /// J/(kg·K)
    pub c_heat: f64,
    pub mass: f64,
    /// Radiating surface (m²).
    pub a2: f64,
    pub emissivity: f64,
    pub t_env: f64,
    pub delta_t: f64,
}

impl Default for ThermalParams {
    /// Fused-silica bench of 160 × 80 × 30 mm on four thin pillars inside a
    /// polished enclosure; geometry calibrated to 0.137 mrad/s per kelvin at
    /// 1.2 m arm difference and 893.2 nm.
    fn default() -> Self {
        Self {
            k_cond: 0.25,
            a1: 5.9885e-4,
            h_pillar: 0.01,
            alpha: 550e-9,
            c_heat: 740.0,
            mass: 0.845,
            a2: 0.04,
            emissivity: 0.03,
            t_env: 293.15,
            delta_t: 1.0,
        }
    }
}

impl ThermalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_cond", self.k_cond),
            ("a1", self.a1),
            ("h_pillar", self.h_pillar),
            ("alpha", self.alpha),
            ("c_heat", self.c_heat),
            ("mass", self.mass),
            ("a2", self.a2),
            ("t_env", self.t_env),
        ] {
            ensure_positive(name, v)?;
        }
        if !(self.emissivity > 0.0 && self.emissivity <= 1.0) {
            return Err(Error::invalid("emissivity", format!("must lie in (0, 1], got {}", self.emissivity)));
        }
        ensure_non_negative("delta_t", self.delta_t)
    }
}

/// Drift contributions of the two heat paths (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalTerms {
    pub conduction: f64,
    pub radiation: f64,
}

impl ThermalTerms {
    pub fn total(&self) -> f64 {
        self.conduction + self.radiation
    }
}

/// Heat flow k·A₁·ΔT/h through the pillars plus the linearized radiative
/// exchange C₀A₂/((2/ε)−1)·(T/100)⁴·4ΔT/T warms the bench at rate P/(C·m),
/// which stretches the arm difference by α·δl per kelvin.
pub fn thermal_terms(p: &ThermalParams, arm_diff: f64, wavelength: f64) -> Result<ThermalTerms> {
    p.validate()?;
    ensure_non_negative("arm_diff", arm_diff)?;
    ensure_positive("wavelength", wavelength)?;
    let pre = std::f64::consts::TAU * p.alpha * arm_diff / (p.c_heat * p.mass * wavelength);
    let conductance = p.k_cond * p.a1 / p.h_pillar;
    let radiance = RADIATION_CONSTANT * p.a2 / (2.0 / p.emissivity - 1.0) * (p.t_env / 100.0).powi(4) * 4.0 / p.t_env;
    Ok(ThermalTerms {
        conduction: pre * conductance * p.delta_t,
        radiation: pre * radiance * p.delta_t,
    })
}

/// Phase drift rate (rad/s) for a temperature offset `p.delta_t`.
pub fn temperature_drift_rate(p: &ThermalParams, arm_diff: f64, wavelength: f64) -> Result<f64> {
    Ok(thermal_terms(p, arm_diff, wavelength)?.total())
}

/// Parameters of every row of the ground-link budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetInputs {
    pub wavelength: f64,
    /// Unbalanced arm difference of each interferometer (m).
    pub arm_diff: f64,
    /// Residual mismatch between sender and receiver interferometers (m).
    pub arm_mismatch: f64,
    /// Source center-frequency wander (Hz/day).
    pub center_freq_drift: f64,
    pub pressure_std_tx: f64,
    pub pressure_std_rx: f64,
    pub refractivity_coeff: f64,
    pub thermal: ThermalParams,
    pub aoi_jitter: f64,
    pub imaging_system: bool,
    pub aoi_coupling: f64,
    pub turbulence: TurbulenceParams,
    pub shot_counts: [f64; 2],
    pub visibility: f64,
    pub scheme: DetectionScheme,
    pub attenuation_cv: f64,
    pub spad_noise_per_cv: f64,
}

impl Default for BudgetInputs {
    fn default() -> Self {
        Self {
            wavelength: 893.2e-9,
            arm_diff: 1.2,
            arm_mismatch: 8.25e-6,
            center_freq_drift: 10e6,
            pressure_std_tx: 3.536e-3,
            pressure_std_rx: 4.420e-3,
            refractivity_coeff: AIR_REFRACTIVITY_PER_PA,
            thermal: ThermalParams::default(),
            aoi_jitter: 62e-6,
            imaging_system: true,
            aoi_coupling: AOI_COUPLING,
            turbulence: TurbulenceParams::urban_link(),
            shot_counts: [36_300.0, 36_300.0],
            visibility: 0.863,
            scheme: DetectionScheme::dual(),
            attenuation_cv: 0.71,
            spad_noise_per_cv: DUAL_SPAD_NOISE_PER_CV,
        }
    }
}

impl BudgetInputs {
    /// The eight sources in table order. Axial turbulence is integrated above
    /// the interferometer's free spectral range c/δl.
    pub fn sources(&self) -> Result<Vec<NoiseSource>> {
        let dl = frequency_to_wavelength_shift(self.wavelength, self.center_freq_drift);
        let cen = center_wavelength_noise(self.arm_mismatch, dl, self.wavelength)? / SECONDS_PER_DAY;
        let tx = air_pressure_noise(self.pressure_std_tx, self.arm_diff, self.wavelength, self.refractivity_coeff)?;
        let rx = air_pressure_noise(self.pressure_std_rx, self.arm_diff, self.wavelength, self.refractivity_coeff)?;
        let per_kelvin = ThermalParams {
            delta_t: 1.0,
            ..self.thermal
        };
        let temp = temperature_drift_rate(&per_kelvin, self.arm_diff, self.wavelength)?;
        let aoi = aoi_phase_noise(self.aoi_jitter, self.imaging_system, self.aoi_coupling)?;
        ensure_positive("arm_diff", self.arm_diff)?;
        let axial = axial_phase_noise(&self.turbulence, SPEED_OF_LIGHT / self.arm_diff)?.integrated_rms;
        let shot = shot_noise_phase(self.shot_counts[0], self.shot_counts[1], self.visibility)?;
        let spad = spad_inconsistency_noise(&self.scheme, self.attenuation_cv, self.spad_noise_per_cv)?;
        Ok(vec![
            NoiseSource::drift("Photon's center wavelength", cen, DisplayUnit::MradPerDay),
            NoiseSource::static_rms("Air pressure (transmitter)", tx).with_decimals(2),
            NoiseSource::static_rms("Air pressure (receiver)", rx),
            NoiseSource::drift("Temperature", temp, DisplayUnit::MradPerSecondPerKelvin),
            NoiseSource::static_rms("Atmospheric turbulence (transverse)", aoi),
            NoiseSource::static_rms("Atmospheric turbulence (axial)", axial).with_decimals(3),
            NoiseSource::static_rms("Shot noise", shot),
            NoiseSource::static_rms("Inconsistency of SPADs", spad),
        ])
    }

    pub fn evaluate(&self) -> Result<NoiseBudget> {
        assemble_budget(self.sources()?)
    }
}
