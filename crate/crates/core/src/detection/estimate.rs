use serde::{Deserialize, Serialize};

use super::campaign::CountRecord;
use crate::error::{ensure_non_negative, Error, Result};
use crate::lstsq::weighted_lstsq;
use crate::series::PhaseSeries;

/// Fewest scan points accepted by [`fit_visibility`].
pub const MIN_SCAN_POINTS: usize = 8;

fn check_counts(c1: f64, c2: f64, visibility: f64) -> Result<()> {
    ensure_non_negative("c1", c1)?;
    ensure_non_negative("c2", c2)?;
    if c1 + c2 <= 0.0 {
        return Err(Error::invalid("counts", "c1 + c2 must be > 0"));
    }
    if !(visibility > 0.0 && visibility <= 1.0) {
        return Err(Error::invalid("visibility", format!("must lie in (0, 1], got {visibility}")));
    }
    Ok(())
}

/// Poisson-limited phase uncertainty of a two-detector readout:
///
/// Δφ = 2·sqrt(C1²C2 + C1C2²) / (V (C1+C2)² · sqrt(1 − (C1−C2)²/(V²(C1+C2)²))).
///
/// Balanced counts reduce it to 1/(V·sqrt(C1+C2)).
pub fn shot_noise_phase(c1: f64, c2: f64, visibility: f64) -> Result<f64> {
    check_counts(c1, c2, visibility)?;
    let n = c1 + c2;
    let ratio = (c1 - c2) / (visibility * n);
    let arg = 1.0 - ratio * ratio;
    if arg <= 0.0 {
        return Err(Error::FringeBoundary { ratio });
    }
    Ok(2.0 * (c1 * c1 * c2 + c1 * c2 * c2).sqrt() / (visibility * n * n * arg.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    /// Φ ∈ [0, π].
    pub phase: f64,
    /// The count ratio landed past the fringe extremum by less than its own
    /// shot-noise σ and was clamped.
    pub clamped: bool,
}

/// Inverts the fringe law p1 = (1 + V cos Φ)/2 from a pair of counts.
pub fn extract_phase(c1: f64, c2: f64, visibility: f64) -> Result<PhaseEstimate> {
    check_counts(c1, c2, visibility)?;
    let (est, excess) = phase_from_counts(c1, c2, visibility);
    if excess > 1.0 {
        return Err(Error::FringeBoundary {
            ratio: (c1 - c2) / (visibility * (c1 + c2)),
        });
    }
    Ok(est)
}

/// Always returns an estimate; `excess` is how far past the boundary the
/// ratio sits in units of its shot-noise σ (0 inside the fringe).
pub(crate) fn phase_from_counts(c1: f64, c2: f64, visibility: f64) -> (PhaseEstimate, f64) {
    let n = c1 + c2;
    let rho = (c1 - c2) / n;
    let ratio = rho / visibility;
    if ratio.abs() <= 1.0 {
        return (
            PhaseEstimate {
                phase: ratio.acos(),
                clamped: false,
            },
            0.0,
        );
    }
    // Var(ρ) = (1 − ρ²)/N, floored at one count.
    let sigma = ((1.0 - rho * rho).max(1.0 / n) / n).sqrt() / visibility;
    let excess = (ratio.abs() - 1.0) / sigma;
    (
        PhaseEstimate {
            phase: if ratio > 0.0 { 0.0 } else { std::f64::consts::PI },
            clamped: true,
        },
        excess,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub visibility: f64,
    pub sigma_visibility: f64,
    /// Offset in y = V cos(φ + offset), wrapped to (−π, π].
    pub phase_offset: f64,
    pub sigma_offset: f64,
    pub chi2: f64,
    pub dof: usize,
}

/// Weighted least-squares fit of (c1 − c2)/(c1 + c2) = V cos(φ + offset)
/// over a phase scan, weighting each point by its Poisson variance
/// (1 − y²)/(c1 + c2).
pub fn fit_visibility(scan: &[(f64, CountRecord)]) -> Result<FringeFit> {
    if scan.len() < MIN_SCAN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_SCAN_POINTS,
            got: scan.len(),
        });
    }
    let (lo, hi) = scan
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (p, _)| (lo.min(*p), hi.max(*p)));
    if hi - lo < std::f64::consts::PI {
        return Err(Error::Degenerate(format!(
            "scan spans {:.3} rad, less than half a fringe",
            hi - lo
        )));
    }
    let mut cos = Vec::with_capacity(scan.len());
    let mut neg_sin = Vec::with_capacity(scan.len());
    let mut y = Vec::with_capacity(scan.len());
    let mut w = Vec::with_capacity(scan.len());
    for (phi, rec) in scan {
        let n = (rec.c1 + rec.c2) as f64;
        if n == 0.0 {
            return Err(Error::invalid("scan", format!("no counts at phase {phi}")));
        }
        let yi = (rec.c1 as f64 - rec.c2 as f64) / n;
        let var = (1.0 - yi * yi).max(1.0 / n) / n;
        cos.push(phi.cos());
        neg_sin.push(-phi.sin());
        y.push(yi);
        w.push(1.0 / var);
    }
    let fit = weighted_lstsq(&[cos, neg_sin], &y, Some(&w))?;
    let (a, b) = (fit.coeffs[0], fit.coeffs[1]);
    let cov = &fit.covariance;
    let v = a.hypot(b);
    let (sigma_v, sigma_off) = if v > 0.0 {
        let (ga, gb) = (a / v, b / v);
        let var_v = ga * ga * cov[(0, 0)] + 2.0 * ga * gb * cov[(0, 1)] + gb * gb * cov[(1, 1)];
        let (ha, hb) = (-b / (v * v), a / (v * v));
        let var_o = ha * ha * cov[(0, 0)] + 2.0 * ha * hb * cov[(0, 1)] + hb * hb * cov[(1, 1)];
        (var_v.max(0.0).sqrt(), var_o.max(0.0).sqrt())
    } else {
        (((cov[(0, 0)] + cov[(1, 1)]) / 2.0).sqrt(), std::f64::consts::PI)
    };
    let chi2 = fit.residuals.iter().zip(&w).map(|(r, wi)| r * r * wi).sum();
    Ok(FringeFit {
        visibility: v,
        sigma_visibility: sigma_v,
        phase_offset: b.atan2(a),
        sigma_offset: sigma_off,
        chi2,
        dof: scan.len() - 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detrend {
    /// rad/s
    pub slope: f64,
    pub sigma_slope: f64,
    pub intercept: f64,
    /// STD of the residuals after removing the line (n − 2 dof).
    pub residual_std: f64,
    pub residuals: Vec<f64>,
}

/// Ordinary least-squares line through the unwrapped phase series.
pub fn detrend_linear(series: &PhaseSeries) -> Result<Detrend> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let un = series.unwrapped();
    let t = un.t();
    let y = un.values();
    let tm = t.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = t.iter().map(|ti| (ti - tm).powi(2)).sum();
    let sxy: f64 = t.iter().zip(y).map(|(ti, yi)| (ti - tm) * (yi - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let residuals: Vec<f64> = t.iter().zip(y).map(|(ti, yi)| yi - intercept - slope * ti).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let residual_std = (ssr / (n - 2) as f64).sqrt();
    Ok(Detrend {
        slope,
        sigma_slope: residual_std / sxx.sqrt(),
        intercept,
        residual_std,
        residuals,
    })
}
