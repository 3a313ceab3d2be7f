//! Photon sources, SPAD models, Monte Carlo measurement campaigns and the
//! estimators applied to their counts.

mod campaign;
mod estimate;
mod g2;
mod spad;

pub use campaign::{
    run_ensemble, simulate_campaign, simulate_fringe_scan, CampaignConfig, CampaignResult, CampaignSummary,
    CountRecord, FringeScanConfig, SUMMARY_SCHEMA,
};
pub use estimate::{
    detrend_linear, extract_phase, fit_visibility, shot_noise_phase, Detrend, FringeFit, PhaseEstimate,
    MIN_SCAN_POINTS,
};
pub use g2::{contamination_rate_for_g2, g2_correlation, simulate_hbt_stream, G2Histogram, HbtConfig};
pub use spad::{
    spad_inconsistency_noise, DetectionScheme, SchemeKind, SourceModel, SpadModel, SpadPair, DUAL_SPAD_NOISE_PER_CV,
};
