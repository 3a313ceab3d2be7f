//! Deterministic random streams.
//!
//! A [`SeededRng`] is a ChaCha8 generator keyed by `(seed, stream_id)`. ChaCha
//! output is specified bit-for-bit, so equal keys give equal draws on every
//! platform. Each (trial, noise source) pair gets its own stream so adding a
//! source never shifts the draws of another.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Noise sources that own a random stream inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamKind {
    Attenuation = 1,
    Counts = 2,
    Emission = 3,
    Routing = 4,
    Contamination = 5,
    Measurement = 6,
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    /// Stream for `kind` within trial `trial`.
    pub fn for_trial(seed: u64, trial: u64, kind: StreamKind) -> Self {
        Self::new(seed, (trial << 8) | kind as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// One Poisson-distributed count with the given mean.
pub fn poisson_sample(rng: &mut SeededRng, mean: f64) -> Result<u64> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::invalid("mean", format!("must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::invalid("mean", e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}
