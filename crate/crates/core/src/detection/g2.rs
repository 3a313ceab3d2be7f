use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::rng::{SeededRng, StreamKind};

/// Hanbury Brown–Twiss measurement of a single-photon stream with an
/// uncorrelated Poissonian background mixed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HbtConfig {
    /// Mean rate of the antibunched emitter (Hz).
    pub single_rate: f64,
    /// Minimum spacing between two emitted photons (s).
    pub dead_time: f64,
    /// Poissonian background rate (Hz).
    pub contamination_rate: f64,
    pub duration: f64,
}

impl HbtConfig {
    /// Emitter plus background tuned to g²(0) = `g2`.
    pub fn for_g2(g2: f64) -> Result<Self> {
        let single_rate = 1e6;
        Ok(Self {
            single_rate,
            dead_time: 20e-9,
            contamination_rate: contamination_rate_for_g2(single_rate, g2)?,
            duration: 5.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("single_rate", self.single_rate)?;
        ensure_non_negative("dead_time", self.dead_time)?;
        ensure_non_negative("contamination_rate", self.contamination_rate)?;
        ensure_positive("duration", self.duration)?;
        if self.single_rate > 0.0 && self.dead_time * self.single_rate >= 1.0 {
            return Err(Error::invalid("dead_time", "must be shorter than the mean photon spacing"));
        }
        if self.single_rate + self.contamination_rate <= 0.0 {
            return Err(Error::invalid("single_rate", "no photons would be emitted"));
        }
        Ok(())
    }
}

/// Background rate that lifts a perfect emitter at `single_rate` to g²(0) = `g2`.
/// With background fraction f the zero-delay coincidences come only from
/// pairs involving a background photon, so g²(0) = 1 − (1 − f)².
pub fn contamination_rate_for_g2(single_rate: f64, g2: f64) -> Result<f64> {
    ensure_positive("single_rate", single_rate)?;
    if !(0.0..1.0).contains(&g2) {
        return Err(Error::invalid("g2", format!("must lie in [0, 1), got {g2}")));
    }
    let f = 1.0 - (1.0 - g2).sqrt();
    Ok(single_rate * f / (1.0 - f))
}

fn arrivals(rate: f64, dead_time: f64, duration: f64, rng: &mut SeededRng) -> Result<Vec<f64>> {
    if rate == 0.0 {
        return Ok(Vec::new());
    }
    let exp = Exp::new(1.0 / (1.0 / rate - dead_time)).map_err(|e| Error::invalid("single_rate", e.to_string()))?;
    let mut out = Vec::with_capacity((rate * duration * 1.1) as usize + 16);
    let mut t = exp.sample(rng);
    while t < duration {
        out.push(t);
        t += dead_time + exp.sample(rng);
    }
    Ok(out)
}

/// Detection times at the two outputs of a 50:50 splitter.
pub fn simulate_hbt_stream(cfg: &HbtConfig, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let mut emission = SeededRng::for_trial(seed, 0, StreamKind::Emission);
    let mut background = SeededRng::for_trial(seed, 0, StreamKind::Contamination);
    let mut routing = SeededRng::for_trial(seed, 0, StreamKind::Routing);
    let signal = arrivals(cfg.single_rate, cfg.dead_time, cfg.duration, &mut emission)?;
    let noise = arrivals(cfg.contamination_rate, 0.0, cfg.duration, &mut background)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for t in signal.into_iter().chain(noise) {
        if routing.random::<bool>() {
            a.push(t);
        } else {
            b.push(t);
        }
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Histogram {
    /// Bin centers, tb − ta (s).
    pub delays: Vec<f64>,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
    /// Mean count of the bins with |τ| ≥ window/2.
    pub plateau: f64,
    pub g2_zero: f64,
}

/// Start-stop histogram of all pairs with |tb − ta| ≤ `window`, normalized to
/// the uncorrelated plateau at large delay. Both inputs must be sorted.
pub fn g2_correlation(a: &[f64], b: &[f64], window: f64, bin: f64) -> Result<G2Histogram> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            got: a.len().min(b.len()),
        });
    }
    ensure_positive("bin", bin)?;
    ensure_positive("window", window)?;
    let half = (window / bin).floor() as i64;
    if half < 2 {
        return Err(Error::invalid("window", "must span at least two bins"));
    }
    let n_bins = (2 * half + 1) as usize;
    let mut counts = vec![0u64; n_bins];
    let mut lo = 0usize;
    for &ta in a {
        while lo < b.len() && b[lo] < ta - window {
            lo += 1;
        }
        for &tb in &b[lo..] {
            let tau = tb - ta;
            if tau > window {
                break;
            }
            let k = (tau / bin).round() as i64;
            if k.abs() <= half {
                counts[(k + half) as usize] += 1;
            }
        }
    }
    let delays: Vec<f64> = (-half..=half).map(|k| k as f64 * bin).collect();
    let far: Vec<u64> = delays
        .iter()
        .zip(&counts)
        .filter(|(d, _)| d.abs() >= window / 2.0)
        .map(|(_, c)| *c)
        .collect();
    let plateau = far.iter().sum::<u64>() as f64 / far.len() as f64;
    if plateau <= 0.0 {
        return Err(Error::Degenerate("no coincidences at large delay".into()));
    }
    let normalized: Vec<f64> = counts.iter().map(|&c| c as f64 / plateau).collect();
    let g2_zero = normalized[half as usize];
    Ok(G2Histogram {
        delays,
        counts,
        normalized,
        plateau,
        g2_zero,
    })
}
