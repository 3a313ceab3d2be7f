use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::units::db_to_linear;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkItem {
    pub name: String,
    pub loss_db: f64,
}

impl LinkItem {
    pub fn new(name: impl Into<String>, loss_db: f64) -> Self {
        Self {
            name: name.into(),
            loss_db,
        }
    }
}

/// Itemized end-to-end loss and the source rate feeding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    pub items: Vec<LinkItem>,
    /// Emitted single-photon rate (Hz).
    pub source_rate: f64,
}

impl LinkBudget {
    /// Geostationary down-link with a 1.2 m satellite telescope, SNSPD
    /// detection and a 0.4 GHz quantum-dot source.
    pub fn geo_satellite() -> Self {
        let items = [
            ("UMI (satellite)", 1.0),
            ("Telescope (satellite)", 2.0),
            ("Atmospheric transmittance", 0.5),
            ("Geometric efficiency", 59.0),
            ("Telescope (ground station)", 2.0),
            ("Multi-mode coupling", 1.0),
            ("UMI (ground station)", 1.0),
            ("SNSPD", 1.0),
        ];
        Self {
            items: items.iter().map(|(n, l)| LinkItem::new(*n, *l)).collect(),
            source_rate: 0.4e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::invalid("items", "link budget has no items"));
        }
        for item in &self.items {
            ensure_non_negative("loss_db", item.loss_db)?;
        }
        ensure_positive("source_rate", self.source_rate)
    }

    pub fn total_db(&self) -> Result<f64> {
        total_link_budget(self)
    }

    /// Source rate after the full budget (Hz).
    pub fn detected_rate(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.source_rate * db_to_linear(self.total_db()?))
    }

    /// Parses `name = loss_dB` lines; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str, source_rate: f64) -> Result<Self> {
        let mut items = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line.rsplit_once('=').ok_or_else(|| Error::Format {
                line: i + 1,
                reason: "expected `name = loss_dB`".into(),
            })?;
            let loss_db = value.trim().parse::<f64>().map_err(|e| Error::Format {
                line: i + 1,
                reason: e.to_string(),
            })?;
            items.push(LinkItem::new(name.trim(), loss_db));
        }
        let b = Self { items, source_rate };
        b.validate()?;
        Ok(b)
    }

    pub fn to_lines(&self) -> String {
        self.items
            .iter()
            .map(|i| format!("{} = {}\n", i.name, i.loss_db))
            .collect()
    }
}

/// Sum of the item losses (dB).
pub fn total_link_budget(b: &LinkBudget) -> Result<f64> {
    if b.items.is_empty() {
        return Err(Error::invalid("items", "link budget has no items"));
    }
    for item in &b.items {
        ensure_non_negative("loss_db", item.loss_db)?;
    }
    Ok(b.items.iter().map(|i| i.loss_db).sum())
}

/// Far-field beam-spread loss 20·log10(θ·R / D) in dB.
pub fn geometric_loss(rx_aperture: f64, divergence: f64, range: f64) -> Result<f64> {
    Ok(-10.0 * geometric_transmittance(rx_aperture, divergence, range)?.log10())
}

/// (D / (θ·R))², the fraction of the spot captured by the aperture.
pub fn geometric_transmittance(rx_aperture: f64, divergence: f64, range: f64) -> Result<f64> {
    ensure_positive("rx_aperture", rx_aperture)?;
    ensure_positive("divergence", divergence)?;
    ensure_positive("range", range)?;
    let spot = divergence * range;
    if spot <= rx_aperture {
        return Err(Error::invalid(
            "range",
            format!("near field: spot {spot} m does not exceed aperture {rx_aperture} m"),
        ));
    }
    Ok((rx_aperture / spot).powi(2))
}

/// Counts needed for a balanced-fringe shot noise of `target`: 1/(V·target)².
pub fn balanced_counts_for(target_shot_noise: f64, visibility: f64) -> Result<f64> {
    ensure_positive("target_shot_noise", target_shot_noise)?;
    if !(visibility > 0.0 && visibility <= 1.0) {
        return Err(Error::invalid("visibility", format!("must lie in (0, 1], got {visibility}")));
    }
    Ok((visibility * target_shot_noise).powi(-2))
}

/// Integration time (s) to reach `target_shot_noise` at `detected_rate`.
pub fn acquisition_time(target_shot_noise: f64, visibility: f64, detected_rate: f64) -> Result<f64> {
    ensure_positive("detected_rate", detected_rate)?;
    Ok(balanced_counts_for(target_shot_noise, visibility)? / detected_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::SECONDS_PER_HOUR;
    use proptest::prelude::*;

    #[test]
    fn table_total() {
        let b = LinkBudget::geo_satellite();
        assert_eq!(total_link_budget(&b).unwrap(), 67.5);
        let zero = LinkBudget {
            items: vec![LinkItem::new("none", 0.0)],
            source_rate: 1.0,
        };
        assert_eq!(total_link_budget(&zero).unwrap(), 0.0);
        let empty = LinkBudget {
            items: vec![],
            source_rate: 1.0,
        };
        assert!(total_link_budget(&empty).is_err());
    }

    #[test]
    fn ground_demo_attenuation() {
        let db = 10.0 * (0.4e9f64 / 1e4).log10();
        assert!((db - 46.02).abs() < 0.01);
    }

    #[test]
    fn geometric_reference() {
        let l = geometric_loss(1.2, 30e-6, 35_786e3).unwrap();
        assert!((l - 59.0).abs() < 0.2, "{l}");
        let half = geometric_loss(1.2, 30e-6, 35_786e3 / 2.0).unwrap();
        assert!((l - half - 20.0 * 2f64.log10()).abs() < 1e-12);
        let t = geometric_transmittance(1.2, 30e-6, 35_786e3).unwrap();
        let brute = (1.2 / (30e-6 * 35_786e3)) * (1.2 / (30e-6 * 35_786e3));
        assert!((t - brute).abs() < 1e-20);
        assert!((t - 1.25e-6).abs() < 0.01e-6);
        assert!(geometric_loss(1.2, 30e-6, 1e3).is_err());
    }

    #[test]
    fn acquisition_reference() {
        let rate = LinkBudget::geo_satellite().detected_rate().unwrap();
        assert!((rate - 71.1).abs() < 0.1, "{rate}");
        let hours = acquisition_time(4.3e-3, 0.863, rate).unwrap() / SECONDS_PER_HOUR;
        assert!((hours - 0.28).abs() / 0.28 < 0.2, "{hours}");
        let ground = acquisition_time(4.3e-3, 0.863, 1e4).unwrap();
        assert!((ground - 7.26).abs() < 0.05, "{ground}");
        assert!((ground - 10.0).abs() / 10.0 < 0.3);
        assert!(acquisition_time(4.3e-3, 0.863, 0.0).is_err());
        let a = acquisition_time(4.3e-3, 0.863, 100.0).unwrap();
        let b = acquisition_time(4.3e-3, 0.863, 200.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn line_format() {
        let b = LinkBudget::geo_satellite();
        let text = format!("# satellite link\n\n{}", b.to_lines());
        let back = LinkBudget::parse_lines(&text, b.source_rate).unwrap();
        assert_eq!(back, b);
        assert!(LinkBudget::parse_lines("no equals sign", 1.0).is_err());
        assert!(LinkBudget::parse_lines("x = abc", 1.0).is_err());
        assert!(LinkBudget::parse_lines("# nothing\n", 1.0).is_err());
    }

    proptest! {
        #[test]
        fn permutation_and_zero_item(mut losses in proptest::collection::vec(0.0..80.0f64, 1..12), seed in any::<u64>()) {
            let build = |ls: &[f64]| LinkBudget {
                items: ls.iter().enumerate().map(|(i, l)| LinkItem::new(format!("i{i}"), *l)).collect(),
                source_rate: 1.0,
            };
            let total = total_link_budget(&build(&losses)).unwrap();
            let k = (seed as usize) % losses.len();
            losses.rotate_left(k);
            losses.reverse();
            let permuted = total_link_budget(&build(&losses)).unwrap();
            prop_assert!((total - permuted).abs() < 1e-9);
            losses.push(0.0);
            prop_assert!((total_link_budget(&build(&losses)).unwrap() - permuted).abs() < 1e-12);
        }

        #[test]
        fn time_times_rate(target in 1e-4..0.1f64, v in 0.05..=1.0f64, rate in 1.0..1e9f64) {
            let t = acquisition_time(target, v, rate).unwrap();
            let n = 1.0 / (v * target).powi(2);
            prop_assert!(((t * rate - n) / n).abs() < 1e-12);
        }
    }
}
