//! Decibel conversions.

/// Transmittance of a loss given in dB: 10^(−loss/10).
pub fn db_to_linear(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// Loss in dB of a transmittance: −10·log10(t).
pub fn linear_to_db(transmittance: f64) -> f64 {
    -10.0 * transmittance.log10()
}
