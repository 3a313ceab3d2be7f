//! Thermal calibration of the interferometer substrate from phase-versus-
//! temperature scans.

use serde::{Deserialize, Serialize};

use crate::constants::{celsius_to_kelvin, kelvin_to_celsius};
use crate::error::{ensure_positive, Error, Result};
use crate::lstsq::weighted_lstsq;
use crate::rng::SeededRng;

/// CTE slope of the ULE demonstrator ((1/K)/K).
pub const ULE_CTE_SLOPE: f64 = 6.8e-9;
/// Temperature where the ULE CTE crosses zero (°C).
pub const ULE_ZERO_CROSSING_C: f64 = 23.87;
/// CTE of fused silica (1/K).
pub const FUSED_SILICA_CTE: f64 = 550e-9;

/// Phase readings against temperature. Temperatures are stored in kelvin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalScan {
    pub temperatures: Vec<f64>,
    pub phases: Vec<f64>,
    /// Optical-path difference of the interferometer (m).
    pub arm_diff: f64,
    pub wavelength: f64,
}

impl ThermalScan {
    pub fn new(temperatures: Vec<f64>, phases: Vec<f64>, arm_diff: f64, wavelength: f64) -> Result<Self> {
        let s = Self {
            temperatures,
            phases,
            arm_diff,
            wavelength,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_celsius(temps_c: &[f64], phases: Vec<f64>, arm_diff: f64, wavelength: f64) -> Result<Self> {
        Self::new(temps_c.iter().map(|&t| celsius_to_kelvin(t)).collect(), phases, arm_diff, wavelength)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("arm_diff", self.arm_diff)?;
        ensure_positive("wavelength", self.wavelength)?;
        if self.temperatures.len() != self.phases.len() {
            return Err(Error::invalid("phases", "one phase per temperature"));
        }
        if self.temperatures.len() < 4 {
            return Err(Error::InsufficientData {
                needed: 4,
                got: self.temperatures.len(),
            });
        }
        if self.temperatures.iter().chain(&self.phases).any(|x| !x.is_finite()) {
            return Err(Error::invalid("scan", "non-finite sample"));
        }
        let (lo, hi) = self.span();
        if hi == lo {
            return Err(Error::Degenerate("all temperatures are equal".into()));
        }
        if hi - lo <= 0.5 {
            return Err(Error::invalid("temperatures", format!("span {:.3} K is not above 0.5 K", hi - lo)));
        }
        Ok(())
    }

    /// (min, max) temperature in K.
    pub fn span(&self) -> (f64, f64) {
        self.temperatures
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)))
    }
}

/// φ(T) = a·x² + b·x + c with x = T − origin (K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub origin: f64,
    /// 1σ of (a, b, c) from the residual scatter.
    pub sigma: [f64; 3],
    pub r_squared: f64,
    /// Validity range of the scan (K).
    pub range: (f64, f64),
}

impl QuadraticFit {
    pub fn eval(&self, t: f64) -> f64 {
        let x = t - self.origin;
        (self.a * x + self.b) * x + self.c
    }
}

/// Least-squares quadratic in temperature centred on the scan mean.
pub fn fit_phase_vs_temperature(scan: &ThermalScan) -> Result<QuadraticFit> {
    scan.validate()?;
    let n = scan.temperatures.len();
    let origin = scan.temperatures.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = scan.temperatures.iter().map(|t| t - origin).collect();
    let cols = [x.iter().map(|v| v * v).collect(), x.clone(), vec![1.0; n]];
    let fit = weighted_lstsq(&cols, &scan.phases, None)?;
    let ssr: f64 = fit.residuals.iter().map(|r| r * r).sum();
    let ym = scan.phases.iter().sum::<f64>() / n as f64;
    let sst: f64 = scan.phases.iter().map(|y| (y - ym).powi(2)).sum();
    let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    let s2 = if n > 3 { ssr / (n - 3) as f64 } else { 0.0 };
    let sigma = [0, 1, 2].map(|i| (fit.covariance[(i, i)] * s2).sqrt());
    Ok(QuadraticFit {
        a: fit.coeffs[0],
        b: fit.coeffs[1],
        c: fit.coeffs[2],
        origin,
        sigma,
        r_squared,
        range: scan.span(),
    })
}

/// CTE(T) = slope·(T − T₀) over the scanned range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CteLine {
    /// (1/K)/K
    pub slope: f64,
    /// CTE at the fit origin (1/K).
    pub offset: f64,
    /// Fit origin (°C).
    pub origin_c: f64,
    /// Where the CTE crosses zero (°C); `None` when the slope vanishes.
    pub zero_crossing_temp: Option<f64>,
    /// °C
    pub validity_range: (f64, f64),
}

impl CteLine {
    pub fn cte_at(&self, temp_c: f64) -> f64 {
        self.offset + self.slope * (temp_c - self.origin_c)
    }

    /// max |CTE| over [lo, hi] (°C).
    pub fn max_abs_cte_within(&self, lo: f64, hi: f64) -> f64 {
        self.cte_at(lo).abs().max(self.cte_at(hi).abs())
    }

    pub fn to_key_values(&self) -> String {
        let zero = match self.zero_crossing_temp {
            Some(t) => t.to_string(),
            None => "none".into(),
        };
        format!(
            "slope = {}\noffset = {}\norigin_c = {}\nzero_crossing_c = {}\nvalidity_min_c = {}\nvalidity_max_c = {}\n",
            self.slope, self.offset, self.origin_c, zero, self.validity_range.0, self.validity_range.1
        )
    }
}

/// CTE(T) = λ/(2π·arm_diff) · dφ/dT.
pub fn cte_from_phase_fit(q: &QuadraticFit, arm_diff: f64, wavelength: f64) -> Result<CteLine> {
    ensure_positive("arm_diff", arm_diff)?;
    ensure_positive("wavelength", wavelength)?;
    let k = wavelength / (std::f64::consts::TAU * arm_diff);
    let slope = 2.0 * q.a * k;
    let offset = q.b * k;
    let origin_c = kelvin_to_celsius(q.origin);
    let zero_crossing_temp = if q.a != 0.0 {
        Some(origin_c - q.b / (2.0 * q.a))
    } else {
        None
    };
    Ok(CteLine {
        slope,
        offset,
        origin_c,
        zero_crossing_temp,
        validity_range: (kelvin_to_celsius(q.range.0), kelvin_to_celsius(q.range.1)),
    })
}

/// |cte_a| / |cte_b|.
pub fn suppression_ratio(cte_a: f64, cte_b: f64) -> Result<f64> {
    if cte_b == 0.0 || !cte_b.is_finite() || !cte_a.is_finite() {
        return Err(Error::invalid("cte_b", "must be finite and non-zero"));
    }
    Ok(cte_a.abs() / cte_b.abs())
}

/// Scan of a substrate whose CTE is `slope·(T − zero_c)`, with Gaussian
/// phase noise of `noise_std`.
pub fn synthetic_scan(
    slope: f64,
    zero_c: f64,
    temps_c: &[f64],
    arm_diff: f64,
    wavelength: f64,
    noise_std: f64,
    rng: &mut SeededRng,
) -> Result<ThermalScan> {
    use rand_distr::{Distribution, Normal};
    let normal = Normal::new(0.0, noise_std).map_err(|e| Error::invalid("noise_std", e.to_string()))?;
    let k = std::f64::consts::TAU * arm_diff / wavelength;
    let phases = temps_c
        .iter()
        .map(|&t| k * 0.5 * slope * (t - zero_c).powi(2) + 0.3 + normal.sample(rng))
        .collect();
    ThermalScan::from_celsius(temps_c, phases, arm_diff, wavelength)
}

/// ULE demonstrator: 0.8 m arm at 1550 nm scanned 21–27 °C in 0.25 °C steps.
pub fn ule_demo_scan(noise_std: f64, rng: &mut SeededRng) -> Result<ThermalScan> {
    let temps: Vec<f64> = (0..=24).map(|i| 21.0 + 0.25 * i as f64).collect();
    synthetic_scan(ULE_CTE_SLOPE, ULE_ZERO_CROSSING_C, &temps, 0.8, 1550e-9, noise_std, rng)
}
