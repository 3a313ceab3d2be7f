//! Run configuration documents and the shipped scenario presets.

use franson_core::budget::{BudgetInputs, DisplayUnit};
use franson_core::channel::LinkBudget;
use franson_core::detection::{CampaignConfig, FringeScanConfig, HbtConfig};
use franson_core::gravity::RedshiftConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One document per run. Each command reads its own section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redshift: Option<RedshiftSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linkbudget: Option<LinkBudgetSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<G2Section>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedshiftSection {
    #[serde(default = "default_delta_l")]
    pub delta_l: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength: f64,
    /// One altitude gives the redshift phase; two give their difference.
    pub altitudes_km: Vec<f64>,
    /// Radial-velocity uncertainty for the Doppler term (m/s).
    #[serde(default = "default_radial_velocity")]
    pub radial_velocity: f64,
    #[serde(default = "default_n_sigma")]
    pub n_sigma: f64,
}

fn default_delta_l() -> f64 {
    RedshiftConfig::satellite().delta_l
}
fn default_wavelength() -> f64 {
    893.2e-9
}
fn default_radial_velocity() -> f64 {
    1e-3
}
fn default_n_sigma() -> f64 {
    5.0
}

impl Default for RedshiftSection {
    fn default() -> Self {
        Self {
            delta_l: default_delta_l(),
            wavelength: default_wavelength(),
            altitudes_km: vec![36_000.0],
            radial_velocity: default_radial_velocity(),
            n_sigma: default_n_sigma(),
        }
    }
}

/// A budget row given directly in display units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualSource {
    pub name: String,
    pub magnitude: f64,
    #[serde(default = "default_unit")]
    pub unit: DisplayUnit,
    #[serde(default = "default_decimals")]
    pub decimals: usize,
}

fn default_unit() -> DisplayUnit {
    DisplayUnit::Mrad
}
fn default_decimals() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    #[serde(default)]
    pub inputs: BudgetInputs,
    /// Keep only these rows of the evaluated budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<String>>,
    /// Replace the evaluated rows with these.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<Vec<ManualSource>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Receiving aperture diameter (m).
    pub rx_aperture: f64,
    /// Full divergence angle (rad).
    pub divergence: f64,
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudgetSection {
    pub source_rate: f64,
    pub items: Vec<franson_core::channel::LinkItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default = "default_target")]
    pub target_precision_mrad: f64,
    #[serde(default = "default_visibility")]
    pub visibility: f64,
}

fn default_target() -> f64 {
    4.3
}
fn default_visibility() -> f64 {
    0.863
}

impl Default for LinkBudgetSection {
    fn default() -> Self {
        let b = LinkBudget::geo_satellite();
        Self {
            source_rate: b.source_rate,
            items: b.items,
            geometry: Some(Geometry {
                rx_aperture: 1.2,
                divergence: 30e-6,
                range: 35_786e3,
            }),
            target_precision_mrad: default_target(),
            visibility: default_visibility(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SimulateMode {
    #[default]
    Campaign,
    Scan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default)]
    pub mode: SimulateMode,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Re-derive the SPAD slope mismatch so the dual readout shows this much
    /// inconsistency noise (mrad).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inconsistency_target_mrad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign: Option<CampaignConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<FringeScanConfig>,
}

fn default_trials() -> u64 {
    1
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            mode: SimulateMode::Campaign,
            trials: 1,
            inconsistency_target_mrad: None,
            campaign: None,
            scan: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// Fringe scan (phase_rad, c1, c2): visibility fit.
    Fringe,
    /// Phase series (t, phase_rad): linear drift.
    Drift,
    /// Count series (t, c1, c2): phase extraction then linear drift.
    Counts,
    /// Thermal scan (temperature_C, phase_rad): CTE line.
    Thermal,
    /// Transmittance series (t, transmittance): fading statistics.
    Attenuation,
    /// Correlation histogram: g²(0).
    G2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<FitKind>,
    /// Visibility assumed when extracting phases from counts.
    #[serde(default = "default_visibility")]
    pub visibility: f64,
    /// Interferometer optical-path difference for thermal scans (m).
    #[serde(default = "default_thermal_arm")]
    pub arm_diff: f64,
    #[serde(default = "default_thermal_wavelength")]
    pub wavelength: f64,
    /// Reference CTE for the suppression ratio (1/K).
    #[serde(default = "default_reference_cte")]
    pub reference_cte: f64,
}

fn default_thermal_arm() -> f64 {
    0.8
}
fn default_thermal_wavelength() -> f64 {
    1550e-9
}
fn default_reference_cte() -> f64 {
    franson_core::calibration::FUSED_SILICA_CTE
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            input: None,
            kind: None,
            visibility: default_visibility(),
            arm_diff: default_thermal_arm(),
            wavelength: default_thermal_wavelength(),
            reference_cte: default_reference_cte(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G2Section {
    #[serde(default = "default_hbt")]
    pub source: HbtConfig,
    /// Largest |delay| histogrammed (s).
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_bin")]
    pub bin: f64,
    /// Timestamp files for the two detectors instead of a simulated stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamps: Option<[String; 2]>,
}

fn default_hbt() -> HbtConfig {
    HbtConfig::for_g2(0.071).expect("valid g2")
}
fn default_window() -> f64 {
    10e-6
}
fn default_bin() -> f64 {
    10e-9
}

impl Default for G2Section {
    fn default() -> Self {
        Self {
            source: default_hbt(),
            window: default_window(),
            bin: default_bin(),
            timestamps: None,
        }
    }
}

/// Shipped scenario documents.
pub const PRESETS: &[(&str, &str)] = &[
    ("geo-50m", include_str!("../presets/geo-50m.toml")),
    ("elliptical-10k-20k", include_str!("../presets/elliptical-10k-20k.toml")),
    ("reference-budget", include_str!("../presets/reference-budget.toml")),
    ("geo-link", include_str!("../presets/geo-link.toml")),
    ("urban-campaign", include_str!("../presets/urban-campaign.toml")),
    ("lab-dual-spad", include_str!("../presets/lab-dual-spad.toml")),
    ("lab-single-spad", include_str!("../presets/lab-single-spad.toml")),
    ("fringe-scan", include_str!("../presets/fringe-scan.toml")),
    ("g2-qd", include_str!("../presets/g2-qd.toml")),
];

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        CliError::Config(format!("unknown preset {name:?}; available: {}", names.join(", ")))
    })?;
    RunConfig::parse(text)
}
