//! Free-space channel: turbulence statistics, stochastic attenuation and the
//! satellite link budget.

mod attenuation;
mod link;
mod turbulence;

pub use attenuation::{attenuation_series, AttenuationProcess};
pub use link::{
    acquisition_time, balanced_counts_for, geometric_loss, geometric_transmittance, total_link_budget, LinkBudget,
    LinkItem,
};
pub use turbulence::{
    aoi_phase_noise, axial_phase_noise, cn2_from_fried, cn2_from_fried_with, fried_from_cn2, fried_from_cn2_with,
    imaging_overlap_response, kolmogorov_psd, AxialNoise, ImagingResponse, TurbulenceParams, AOI_COUPLING,
    IMAGING_DIRECTION_GAIN, IMAGING_POSITION_GAIN, IMAGING_SUPPRESSION, PLANE_WAVE_FRIED_PREFACTOR,
};
