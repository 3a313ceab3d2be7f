//! CSV interchange for count records, phase series, scans and histograms.
//!
//! Every file opens with a `# col,col,...` line naming the columns, followed
//! by bare numeric rows. Floats are written in shortest round-trip form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::calibration::ThermalScan;
use crate::constants::{celsius_to_kelvin, kelvin_to_celsius};
use crate::detection::{CountRecord, G2Histogram};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsvKind {
    Counts,
    Phase,
    Fringe,
    Thermal,
    Attenuation,
    G2,
}

impl CsvKind {
    pub const ALL: [CsvKind; 6] = [
        CsvKind::Counts,
        CsvKind::Phase,
        CsvKind::Fringe,
        CsvKind::Thermal,
        CsvKind::Attenuation,
        CsvKind::G2,
    ];

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            CsvKind::Counts => &["t", "c1", "c2"],
            CsvKind::Phase => &["t", "phase_rad"],
            CsvKind::Fringe => &["phase_rad", "c1", "c2"],
            CsvKind::Thermal => &["temperature_C", "phase_rad"],
            CsvKind::Attenuation => &["t", "transmittance"],
            CsvKind::G2 => &["delay_s", "counts", "normalized"],
        }
    }

    pub fn header(self) -> String {
        format!("# {}", self.columns().join(","))
    }

    /// Kind named by the `#` header on the first line.
    pub fn detect(text: &str) -> Option<CsvKind> {
        let first = text.lines().next()?.trim();
        let cols = first.strip_prefix('#')?.trim();
        Self::ALL.into_iter().find(|k| cols == k.columns().join(","))
    }
}

fn writer<W: Write>(mut w: W, kind: CsvKind) -> Result<csv::Writer<W>> {
    writeln!(w, "{}", kind.header())?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(w))
}

fn rows<R: Read>(mut r: R, kind: CsvKind) -> Result<Vec<(usize, Vec<String>)>> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let want = kind.columns().len();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rec: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if rec.len() != want {
            return Err(Error::Format {
                line: i + 1,
                reason: format!("expected {want} columns ({}), got {}", kind.columns().join(","), rec.len()),
            });
        }
        out.push((i + 1, rec));
    }
    Ok(out)
}

fn float(rec: &[String], i: usize, line: usize) -> Result<f64> {
    let s = rec[i].as_str();
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Format {
            line,
            reason: format!("column {} is not a finite number: {s:?}", i + 1),
        })
}

fn count(rec: &[String], i: usize, line: usize) -> Result<u64> {
    let s = rec[i].as_str();
    s.parse::<u64>().map_err(|_| Error::Format {
        line,
        reason: format!("column {} is not a count: {s:?}", i + 1),
    })
}

fn finish<W: Write>(w: csv::Writer<W>) -> Result<()> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))?.flush()?;
    Ok(())
}

pub fn write_counts<W: Write>(w: W, records: &[CountRecord]) -> Result<()> {
    let mut w = writer(w, CsvKind::Counts)?;
    for r in records {
        w.write_record([r.t.to_string(), r.c1.to_string(), r.c2.to_string()])?;
    }
    finish(w)
}

pub fn read_counts<R: Read>(r: R) -> Result<Vec<CountRecord>> {
    rows(r, CsvKind::Counts)?
        .into_iter()
        .map(|(l, rec)| {
            Ok(CountRecord {
                t: float(&rec, 0, l)?,
                c1: count(&rec, 1, l)?,
                c2: count(&rec, 2, l)?,
            })
        })
        .collect()
}

fn write_series<W: Write>(w: W, kind: CsvKind, s: &TimeSeries) -> Result<()> {
    let mut w = writer(w, kind)?;
    for (t, v) in s.iter() {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    finish(w)
}

fn read_series<R: Read>(r: R, kind: CsvKind) -> Result<TimeSeries> {
    let (mut t, mut v) = (Vec::new(), Vec::new());
    for (l, rec) in rows(r, kind)? {
        t.push(float(&rec, 0, l)?);
        v.push(float(&rec, 1, l)?);
    }
    TimeSeries::new(t, v)
}

pub fn write_phase<W: Write>(w: W, s: &TimeSeries) -> Result<()> {
    write_series(w, CsvKind::Phase, s)
}

pub fn read_phase<R: Read>(r: R) -> Result<TimeSeries> {
    read_series(r, CsvKind::Phase)
}

pub fn write_attenuation<W: Write>(w: W, s: &TimeSeries) -> Result<()> {
    write_series(w, CsvKind::Attenuation, s)
}

pub fn read_attenuation<R: Read>(r: R) -> Result<TimeSeries> {
    read_series(r, CsvKind::Attenuation)
}

pub fn write_fringe<W: Write>(w: W, scan: &[(f64, CountRecord)]) -> Result<()> {
    let mut w = writer(w, CsvKind::Fringe)?;
    for (phi, r) in scan {
        w.write_record([phi.to_string(), r.c1.to_string(), r.c2.to_string()])?;
    }
    finish(w)
}

/// Scan points; the record time is the row index.
pub fn read_fringe<R: Read>(r: R) -> Result<Vec<(f64, CountRecord)>> {
    rows(r, CsvKind::Fringe)?
        .into_iter()
        .enumerate()
        .map(|(i, (l, rec))| {
            Ok((
                float(&rec, 0, l)?,
                CountRecord {
                    t: i as f64,
                    c1: count(&rec, 1, l)?,
                    c2: count(&rec, 2, l)?,
                },
            ))
        })
        .collect()
}

pub fn write_thermal<W: Write>(w: W, scan: &ThermalScan) -> Result<()> {
    let mut w = writer(w, CsvKind::Thermal)?;
    for (t, p) in scan.temperatures.iter().zip(&scan.phases) {
        w.write_record([kelvin_to_celsius(*t).to_string(), p.to_string()])?;
    }
    finish(w)
}

pub fn read_thermal<R: Read>(r: R, arm_diff: f64, wavelength: f64) -> Result<ThermalScan> {
    let (mut t, mut p) = (Vec::new(), Vec::new());
    for (l, rec) in rows(r, CsvKind::Thermal)? {
        t.push(celsius_to_kelvin(float(&rec, 0, l)?));
        p.push(float(&rec, 1, l)?);
    }
    ThermalScan::new(t, p, arm_diff, wavelength)
}

pub fn write_g2<W: Write>(w: W, h: &G2Histogram) -> Result<()> {
    let mut w = writer(w, CsvKind::G2)?;
    for ((d, c), n) in h.delays.iter().zip(&h.counts).zip(&h.normalized) {
        w.write_record([d.to_string(), c.to_string(), n.to_string()])?;
    }
    finish(w)
}

/// Histogram rows; the plateau is recovered from `counts / normalized`.
pub fn read_g2<R: Read>(r: R) -> Result<G2Histogram> {
    let (mut delays, mut counts, mut normalized) = (Vec::new(), Vec::new(), Vec::new());
    for (l, rec) in rows(r, CsvKind::G2)? {
        delays.push(float(&rec, 0, l)?);
        counts.push(count(&rec, 1, l)?);
        normalized.push(float(&rec, 2, l)?);
    }
    if delays.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let plateau = counts
        .iter()
        .zip(&normalized)
        .find(|(_, n)| **n > 0.0)
        .map_or(0.0, |(c, n)| *c as f64 / n);
    let zero = delays
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map_or(0, |(i, _)| i);
    let g2_zero = normalized[zero];
    Ok(G2Histogram {
        delays,
        counts,
        normalized,
        plateau,
        g2_zero,
    })
}
