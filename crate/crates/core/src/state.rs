//! Time-bin ⊗ polarization single-photon states and the two unbalanced
//! Michelson interferometers (UMIs) of the Franson setup.
//!
//! The basis is {S, L} × {H, V}. The transmitter UMI sends one polarization
//! through its long arm, encoding it one bin later; the receiver UMI delays
//! the other polarization by the same amount so both branches re-overlap in
//! bin L, where a σx measurement reads out the accumulated relative phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeBin {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn other(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

fn index(bin: TimeBin, pol: Polarization) -> usize {
    let b = match bin {
        TimeBin::Short => 0,
        TimeBin::Long => 2,
    };
    let p = match pol {
        Polarization::H => 0,
        Polarization::V => 1,
    };
    b + p
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    amplitudes: [Complex64; 4],
    wavelength: f64,
    coherence_length: f64,
    /// Optical delay between the bins, set once a transmitter UMI has encoded
    /// the photon.
    bin_separation: Option<f64>,
}

impl PhotonState {
    /// Validated constructor; `amplitudes` are ordered (S,H), (S,V), (L,H), (L,V).
    pub fn new(amplitudes: [Complex64; 4], wavelength: f64, coherence_length: f64) -> Result<Self> {
        ensure_positive("wavelength", wavelength)?;
        ensure_positive("coherence_length", coherence_length)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::State(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            amplitudes,
            wavelength,
            coherence_length,
            bin_separation: None,
        })
    }

    pub fn amplitude(&self, bin: TimeBin, pol: Polarization) -> Complex64 {
        self.amplitudes[index(bin, pol)]
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn coherence_length(&self) -> f64 {
        self.coherence_length
    }

    pub fn bin_separation(&self) -> Option<f64> {
        self.bin_separation
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bin_weight(&self, bin: TimeBin) -> f64 {
        self.amplitude(bin, Polarization::H).norm_sqr() + self.amplitude(bin, Polarization::V).norm_sqr()
    }

    /// Probabilities of H and V, summed over time bins.
    pub fn polarization_probabilities(&self) -> (f64, f64) {
        let p = |pol| self.amplitude(TimeBin::Short, pol).norm_sqr() + self.amplitude(TimeBin::Long, pol).norm_sqr();
        (p(Polarization::H), p(Polarization::V))
    }

    /// Relative phase arg(a_V / a_H) inside `bin`, in (−π, π].
    pub fn relative_phase(&self, bin: TimeBin) -> f64 {
        let h = self.amplitude(bin, Polarization::H);
        let v = self.amplitude(bin, Polarization::V);
        (v * h.conj()).arg()
    }

    /// Multiplies the `pol` component by e^{iφ}: a differential phase picked
    /// up by one branch (channel, Doppler, redshift).
    pub fn with_phase(mut self, pol: Polarization, phase: f64) -> Self {
        let rot = Complex64::from_polar(1.0, phase);
        for bin in [TimeBin::Short, TimeBin::Long] {
            self.amplitudes[index(bin, pol)] *= rot;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UmiParams {
    /// One-way optical-path difference between the arms, already including
    /// the Michelson round trip, so the bin delay is `delta_l / c`.
    pub delta_l: f64,
    pub internal_phase: f64,
    pub pol_to_long: Polarization,
    pub transmittance: f64,
}

impl UmiParams {
    pub fn new(delta_l: f64, internal_phase: f64, pol_to_long: Polarization, transmittance: f64) -> Result<Self> {
        let p = Self {
            delta_l,
            internal_phase,
            pol_to_long,
            transmittance,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("delta_l", self.delta_l)?;
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::invalid("transmittance", format!("must lie in (0, 1], got {}", self.transmittance)));
        }
        if !self.internal_phase.is_finite() {
            return Err(Error::invalid("internal_phase", "must be finite"));
        }
        Ok(())
    }

    /// Delay between the bins (s).
    pub fn delay(&self) -> f64 {
        self.delta_l / crate::constants::SPEED_OF_LIGHT
    }
}

/// (|H⟩ + |V⟩)/√2 in the short bin.
pub fn prepare_superposition(wavelength: f64, coherence_length: f64) -> Result<PhotonState> {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    PhotonState::new([a, a, z, z], wavelength, coherence_length)
}

/// Transmitter UMI: the long-arm polarization moves to bin L and picks up
/// e^{iφ_t}; the other polarization stays in bin S.
pub fn transmit_umi(state: &PhotonState, umi: &UmiParams) -> Result<PhotonState> {
    umi.validate()?;
    if state.bin_weight(TimeBin::Long) > NORM_TOL {
        return Err(Error::State(
            "transmitter input must occupy the short bin only (double pass unsupported)".into(),
        ));
    }
    let long = umi.pol_to_long;
    let short = long.other();
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    amps[index(TimeBin::Short, short)] = state.amplitude(TimeBin::Short, short);
    amps[index(TimeBin::Long, long)] =
        state.amplitude(TimeBin::Short, long) * Complex64::from_polar(1.0, umi.internal_phase);
    Ok(PhotonState {
        amplitudes: amps,
        wavelength: state.wavelength,
        coherence_length: state.coherence_length,
        bin_separation: Some(umi.delta_l),
    })
}

/// What the receiver reports besides the output state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiveReport {
    /// |δl_receiver − δl_transmitter| (m).
    pub arm_mismatch: f64,
    /// Set when the mismatch exceeds the photon's coherence length; the state
    /// is still returned and the loss of contrast belongs in
    /// [`VisibilityFactors`].
    pub mismatch_flagged: bool,
}

/// Receiver UMI: delays the short-bin polarization into bin L so both
/// branches overlap, applying the analysis phase φ and the internal phase φ_r
/// to the V branch. The relative V/H phase of the output is
/// φ_t + φ + φ_r plus whatever channel phase the state already carried.
pub fn receive_umi(state: &PhotonState, umi: &UmiParams, analysis_phase: f64) -> Result<(PhotonState, ReceiveReport)> {
    umi.validate()?;
    let separation = state
        .bin_separation
        .ok_or_else(|| Error::State("receiver input was not encoded by a transmitter UMI".into()))?;
    let delayed = umi.pol_to_long;
    let already_late = delayed.other();
    if state.amplitude(TimeBin::Long, delayed).norm_sqr() > NORM_TOL
        || state.amplitude(TimeBin::Short, already_late).norm_sqr() > NORM_TOL
    {
        return Err(Error::State(format!(
            "receiver expects {delayed:?} in the short bin and {already_late:?} in the long bin"
        )));
    }
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    amps[index(TimeBin::Long, delayed)] = state.amplitude(TimeBin::Short, delayed);
    amps[index(TimeBin::Long, already_late)] = state.amplitude(TimeBin::Long, already_late);
    let out = PhotonState {
        amplitudes: amps,
        wavelength: state.wavelength,
        coherence_length: state.coherence_length,
        bin_separation: Some(0.0),
    }
    .with_phase(Polarization::V, analysis_phase + umi.internal_phase);
    let arm_mismatch = (umi.delta_l - separation).abs();
    Ok((
        out,
        ReceiveReport {
            arm_mismatch,
            mismatch_flagged: arm_mismatch > state.coherence_length,
        },
    ))
}

/// σx outcome probabilities for a fringe of total phase Φ and visibility V:
/// p1 = (1 + V cos Φ)/2, p2 = 1 − p1.
pub fn detection_probabilities(total_phase: f64, visibility: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::invalid("visibility", format!("must lie in [0, 1], got {visibility}")));
    }
    let p1 = 0.5 * (1.0 + visibility * total_phase.cos());
    Ok((p1, 1.0 - p1))
}

/// σx outcome probabilities computed from the overlapped-bin amplitudes, with
/// `mode_overlap` scaling the H/V cross term.
pub fn sigma_x_probabilities(state: &PhotonState, mode_overlap: f64) -> (f64, f64) {
    let h = state.amplitude(TimeBin::Long, Polarization::H);
    let v = state.amplitude(TimeBin::Long, Polarization::V);
    let total = h.norm_sqr() + v.norm_sqr();
    let cross = 2.0 * mode_overlap * (h.conj() * v).re;
    let p1 = 0.5 * (total + cross) / total;
    (p1, 1.0 - p1)
}

/// Contributions to the fringe contrast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityFactors {
    pub mode_overlap: f64,
    pub g2_zero: f64,
    /// Residual optical-path difference between the two UMIs (m).
    pub arm_mismatch: f64,
    pub coherence_length: f64,
}

impl Default for VisibilityFactors {
    /// Calibrated so the product is the measured 0.863: the two UMIs differ by
    /// 8.25 µm, g²(0) = 0.071, and the remaining deficit is mode overlap.
    fn default() -> Self {
        Self {
            mode_overlap: 0.928_96,
            g2_zero: 0.071,
            arm_mismatch: 8.25e-6,
            coherence_length: 0.1,
        }
    }
}

impl VisibilityFactors {
    pub fn perfect() -> Self {
        Self {
            mode_overlap: 1.0,
            g2_zero: 0.0,
            arm_mismatch: 0.0,
            coherence_length: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mode_overlap) {
            return Err(Error::invalid("mode_overlap", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.g2_zero) {
            return Err(Error::invalid("g2_zero", "must lie in [0, 1]"));
        }
        ensure_non_negative("arm_mismatch", self.arm_mismatch)?;
        if self.coherence_length.is_nan() || self.coherence_length < 0.0 {
            return Err(Error::invalid("coherence_length", "must be >= 0"));
        }
        Ok(())
    }
}

/// V = mode_overlap · (1 − g²(0)) · exp(−(mismatch/coherence_length)²),
/// clipped to [0, 1].
pub fn effective_visibility(f: &VisibilityFactors) -> Result<f64> {
    f.validate()?;
    let coherence = if f.arm_mismatch == 0.0 {
        1.0
    } else if f.coherence_length == 0.0 {
        0.0
    } else {
        (-(f.arm_mismatch / f.coherence_length).powi(2)).exp()
    };
    Ok((f.mode_overlap * (1.0 - f.g2_zero) * coherence).clamp(0.0, 1.0))
}
