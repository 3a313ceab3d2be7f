use serde::{Deserialize, Serialize};

use crate::channel::AttenuationProcess;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Dual-SPAD phase noise per unit count-rate STD/mean: 11.4 mrad measured at 0.52.
pub const DUAL_SPAD_NOISE_PER_CV: f64 = 11.4e-3 / 0.52;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceModel {
    /// Single-photon emission rate (Hz).
    pub rate: f64,
    pub wavelength: f64,
    pub g2_zero: f64,
    /// Center-frequency wander (Hz per day).
    pub center_freq_drift: f64,
}

impl SourceModel {
    /// Resonantly driven In(Ga)As quantum dot in a micropillar.
    pub fn quantum_dot() -> Self {
        Self {
            rate: 0.4e9,
            wavelength: 893.2e-9,
            g2_zero: 0.071,
            center_freq_drift: 10e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("rate", self.rate)?;
        ensure_positive("wavelength", self.wavelength)?;
        if !(0.0..=1.0).contains(&self.g2_zero) {
            return Err(Error::invalid("g2_zero", "must lie in [0, 1]"));
        }
        ensure_non_negative("center_freq_drift", self.center_freq_drift)
    }
}

/// Single-photon avalanche detector whose efficiency drifts linearly with the
/// log of the incident rate: η(R) = base · (1 + slope · log10(R / reference_rate)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpadModel {
    pub base_efficiency: f64,
    /// Dark counts (Hz).
    pub dark_rate: f64,
    /// Relative efficiency change per decade of incident rate.
    pub rate_efficiency_slope: f64,
    pub reference_rate: f64,
}

impl Default for SpadModel {
    fn default() -> Self {
        Self {
            base_efficiency: 0.6,
            dark_rate: 0.0,
            rate_efficiency_slope: 0.0,
            reference_rate: 1e4,
        }
    }
}

impl SpadModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_efficiency > 0.0 && self.base_efficiency <= 1.0) {
            return Err(Error::invalid("base_efficiency", "must lie in (0, 1]"));
        }
        ensure_non_negative("dark_rate", self.dark_rate)?;
        ensure_positive("reference_rate", self.reference_rate)?;
        if !self.rate_efficiency_slope.is_finite() {
            return Err(Error::invalid("rate_efficiency_slope", "must be finite"));
        }
        Ok(())
    }

    /// Efficiency at `incident_rate`, kept inside (0, 1].
    pub fn efficiency(&self, incident_rate: f64) -> f64 {
        let decades = if incident_rate > 0.0 {
            (incident_rate / self.reference_rate).log10()
        } else {
            0.0
        };
        (self.base_efficiency * (1.0 + self.rate_efficiency_slope * decades)).clamp(1e-9, 1.0)
    }

    /// Efficiency relative to `base_efficiency`.
    pub fn relative_efficiency(&self, incident_rate: f64) -> f64 {
        self.efficiency(incident_rate) / self.base_efficiency
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    DualSpad,
    SingleSpadTimeDivision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionScheme {
    pub kind: SchemeKind,
    /// Delay between the two interferometer outputs sharing one SPAD (s).
    #[serde(default)]
    pub time_division_delay: f64,
}

impl DetectionScheme {
    pub fn dual() -> Self {
        Self {
            kind: SchemeKind::DualSpad,
            time_division_delay: 0.0,
        }
    }

    /// Outputs recombined on one SPAD after a 3.1 ns fiber delay.
    pub fn single() -> Self {
        Self {
            kind: SchemeKind::SingleSpadTimeDivision,
            time_division_delay: 3.1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == SchemeKind::SingleSpadTimeDivision {
            ensure_positive("time_division_delay", self.time_division_delay)?;
        }
        Ok(())
    }
}

/// The two detectors of a dual-SPAD readout (only `a` is used by the
/// time-division scheme).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpadPair {
    pub a: SpadModel,
    pub b: SpadModel,
}

impl Default for SpadPair {
    fn default() -> Self {
        Self::matched(SpadModel::default())
    }
}

impl SpadPair {
    pub fn matched(model: SpadModel) -> Self {
        Self { a: model, b: model }
    }

    /// Detectors whose rate slopes differ by `delta_slope` (split ±½).
    pub fn with_mismatch(base: SpadModel, delta_slope: f64) -> Self {
        Self {
            a: SpadModel {
                rate_efficiency_slope: base.rate_efficiency_slope + 0.5 * delta_slope,
                ..base
            },
            b: SpadModel {
                rate_efficiency_slope: base.rate_efficiency_slope - 0.5 * delta_slope,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.a.validate()?;
        self.b.validate()
    }

    /// Slope difference that makes a dual-SPAD readout at fringe phase
    /// `phase` show `target_rms` of phase noise under `attenuation`.
    ///
    /// To first order the efficiency ratio is 1 + Δs·log10(g) for relative
    /// transmittance g, and a ratio error ε moves the extracted phase by
    /// (1 − V²cos²Φ)/(2V sinΦ) · ε.
    pub fn mismatch_for_target(
        target_rms: f64,
        attenuation: &AttenuationProcess,
        visibility: f64,
        phase: f64,
    ) -> Result<f64> {
        ensure_non_negative("target_rms", target_rms)?;
        if !(visibility > 0.0 && visibility <= 1.0) {
            return Err(Error::invalid("visibility", "must lie in (0, 1]"));
        }
        let sin = phase.sin().abs();
        if sin < 1e-6 {
            return Err(Error::invalid("phase", "phase sits on a fringe extremum"));
        }
        let sensitivity = (1.0 - (visibility * phase.cos()).powi(2)) / (2.0 * visibility * sin);
        let spread = attenuation.log10_std()?;
        if spread == 0.0 {
            return if target_rms == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::invalid("attenuation", "constant channel cannot produce inconsistency noise"))
            };
        }
        Ok(target_rms / (sensitivity * spread))
    }
}

/// Systematic phase noise from detector inconsistency for a channel whose
/// count rate has the given STD/mean. The dual-SPAD value scales linearly in
/// the ratio with `coefficient` (rad per unit ratio); time division reads both
/// outputs with the same detector, so the efficiency curve cancels in the
/// count ratio and nothing systematic remains.
pub fn spad_inconsistency_noise(scheme: &DetectionScheme, attenuation_cv: f64, coefficient: f64) -> Result<f64> {
    ensure_non_negative("attenuation_cv", attenuation_cv)?;
    ensure_non_negative("coefficient", coefficient)?;
    scheme.validate()?;
    Ok(match scheme.kind {
        SchemeKind::DualSpad => coefficient * attenuation_cv,
        SchemeKind::SingleSpadTimeDivision => 0.0,
    })
}
