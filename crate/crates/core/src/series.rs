use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timestamped scalar samples with strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    values: Vec<f64>,
    sample_rate: f64,
}

/// A series whose values are phases in rad.
pub type PhaseSeries = TimeSeries;

impl TimeSeries {
    /// Builds a series from parallel vectors. The sample rate is inferred from
    /// the mean spacing (0 for fewer than two samples).
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() {
            return Err(Error::invalid(
                "series",
                format!("{} times but {} values", t.len(), values.len()),
            ));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("series", "non-finite timestamp"));
        }
        if let Some(w) = t.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "series",
                format!("timestamps not strictly increasing at {} -> {}", w[0], w[1]),
            ));
        }
        let sample_rate = if t.len() >= 2 {
            (t.len() - 1) as f64 / (t[t.len() - 1] - t[0])
        } else {
            0.0
        };
        Ok(Self {
            t,
            values,
            sample_rate,
        })
    }

    /// Uniformly sampled series starting at `start` with the given period.
    pub fn uniform(start: f64, period: f64, values: Vec<f64>) -> Result<Self> {
        crate::error::ensure_positive("period", period)?;
        let t = (0..values.len()).map(|i| start + i as f64 * period).collect();
        Self::new(t, values)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.values.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Sample standard deviation (n − 1 denominator).
    pub fn std(&self) -> f64 {
        sample_std(&self.values)
    }

    /// Phase values made continuous by picking, for each sample, the 2π branch
    /// nearest the previous unwrapped sample.
    pub fn unwrapped(&self) -> TimeSeries {
        TimeSeries {
            t: self.t.clone(),
            values: unwrap_phase(&self.values),
            sample_rate: self.sample_rate,
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn unwrap_phase(values: &[f64]) -> Vec<f64> {
    use std::f64::consts::TAU;
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<f64> = None;
    for &v in values {
        let u = match prev {
            None => v,
            Some(p) => v + TAU * ((p - v) / TAU).round(),
        };
        out.push(u);
        prev = Some(u);
    }
    out
}
