//! One function per subcommand. Each returns a serializable report and
//! writes its data products into the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use franson_core::budget::{assemble_budget, NoiseBudget, NoiseKind, NoiseSource};
use franson_core::calibration::{cte_from_phase_fit, fit_phase_vs_temperature, suppression_ratio, CteLine, QuadraticFit};
use franson_core::channel::{acquisition_time, balanced_counts_for, geometric_loss, LinkBudget, LinkItem};
use franson_core::constants::{kelvin_to_celsius, SECONDS_PER_HOUR};
use franson_core::detection::{
    detrend_linear, extract_phase, fit_visibility, g2_correlation, run_ensemble, simulate_fringe_scan,
    simulate_hbt_stream, CampaignConfig, CampaignSummary, Detrend, FringeFit, SpadModel, SpadPair,
};
use franson_core::formats::{self, CsvKind};
use franson_core::gravity::{doppler_phase, precision_target, redshift_asymptote, redshift_phase, OrbitPoint, RedshiftConfig};
use franson_core::rng::{SeededRng, StreamKind};
use franson_core::series::{sample_std, TimeSeries};
use serde::Serialize;

use crate::config::{
    BudgetSection, FitKind, FitSection, G2Section, LinkBudgetSection, RedshiftSection, SimulateMode, SimulateSection,
};
use crate::error::CliError;

/// Schema tag of the multi-trial summary.
pub const ENSEMBLE_SCHEMA: &str = "franson.ensemble-summary/1";

/// Human, CSV and JSON renderings of a report.
pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> String;
    fn json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(CliError::io(&path))?;
    Ok(path)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> franson_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// ---------------------------------------------------------------- redshift

#[derive(Debug, Clone, Serialize)]
pub struct RedshiftPoint {
    pub altitude_km: f64,
    pub phase_rad: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RedshiftReport {
    pub delta_l: f64,
    pub wavelength: f64,
    pub points: Vec<RedshiftPoint>,
    /// Last minus first point, when two or more are given.
    pub difference_rad: Option<f64>,
    pub asymptote_rad: f64,
    /// The signal the precision target refers to (rad).
    pub signal_rad: f64,
    pub n_sigma: f64,
    pub precision_target_rad: f64,
    pub radial_velocity: f64,
    pub doppler_rad: f64,
}

pub fn cmd_redshift(s: &RedshiftSection) -> Result<RedshiftReport, CliError> {
    if s.altitudes_km.is_empty() {
        return Err(CliError::Config("redshift.altitudes_km is empty".into()));
    }
    let cfg = RedshiftConfig {
        delta_l: s.delta_l,
        wavelength: s.wavelength,
    };
    let points = s
        .altitudes_km
        .iter()
        .map(|&h| {
            Ok(RedshiftPoint {
                altitude_km: h,
                phase_rad: redshift_phase(&cfg, &OrbitPoint::at_altitude(h * 1e3))?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let difference_rad = (points.len() > 1).then(|| points[points.len() - 1].phase_rad - points[0].phase_rad);
    let signal_rad = difference_rad.unwrap_or(points[0].phase_rad);
    Ok(RedshiftReport {
        delta_l: s.delta_l,
        wavelength: s.wavelength,
        asymptote_rad: redshift_asymptote(&cfg)?,
        difference_rad,
        signal_rad,
        n_sigma: s.n_sigma,
        precision_target_rad: precision_target(signal_rad, s.n_sigma)?,
        radial_velocity: s.radial_velocity,
        doppler_rad: doppler_phase(&cfg, s.radial_velocity)?,
        points,
    })
}

impl Render for RedshiftReport {
    fn text(&self) -> String {
        let mut out = format!("delta_l = {} m, wavelength = {:.1} nm\n", self.delta_l, self.wavelength * 1e9);
        for p in &self.points {
            let _ = writeln!(out, "h = {:>9.1} km  phase = {:.3} mrad", p.altitude_km, p.phase_rad * 1e3);
        }
        if let Some(d) = self.difference_rad {
            let _ = writeln!(out, "difference       {:.3} mrad", d * 1e3);
        }
        let _ = writeln!(out, "asymptote        {:.3} mrad", self.asymptote_rad * 1e3);
        let _ = writeln!(
            out,
            "target at {}σ     {:.3} mrad",
            self.n_sigma,
            self.precision_target_rad * 1e3
        );
        let _ = writeln!(
            out,
            "Doppler at {} m/s  {:.4} mrad",
            self.radial_velocity,
            self.doppler_rad * 1e3
        );
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("# altitude_km,phase_rad\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.altitude_km, p.phase_rad);
        }
        out
    }
}

// ------------------------------------------------------------------ budget

#[derive(Debug, Clone, Serialize)]
pub struct BudgetReport {
    #[serde(flatten)]
    pub budget: NoiseBudget,
}

pub fn cmd_budget(s: &BudgetSection, out: &Path) -> Result<BudgetReport, CliError> {
    let mut sources: Vec<NoiseSource> = match &s.sources {
        Some(manual) => manual
            .iter()
            .map(|m| {
                let src = NoiseSource {
                    name: m.name.clone(),
                    magnitude: m.magnitude / m.unit.scale(),
                    kind: if m.unit == franson_core::budget::DisplayUnit::Mrad {
                        NoiseKind::StaticRms
                    } else {
                        NoiseKind::DriftRate
                    },
                    unit: m.unit,
                    decimals: m.decimals,
                };
                src.validate()?;
                Ok(src)
            })
            .collect::<Result<_, CliError>>()?,
        None => s.inputs.sources()?,
    };
    if let Some(rows) = &s.rows {
        for r in rows {
            if !sources.iter().any(|src| &src.name == r) {
                return Err(CliError::Config(format!("budget.rows names unknown source {r:?}")));
            }
        }
        sources.retain(|src| rows.contains(&src.name));
    }
    if sources.is_empty() {
        return Err(CliError::Config("budget has no sources".into()));
    }
    let budget = assemble_budget(sources)?;
    write_file(out, "budget.csv", budget.to_csv().as_bytes())?;
    write_file(out, "budget.txt", budget.to_table().as_bytes())?;
    Ok(BudgetReport { budget })
}

impl Render for BudgetReport {
    fn text(&self) -> String {
        self.budget.to_table()
    }
    fn csv(&self) -> String {
        self.budget.to_csv()
    }
}

// -------------------------------------------------------------- linkbudget

#[derive(Debug, Clone, Serialize)]
pub struct LinkReport {
    pub items: Vec<LinkItem>,
    pub total_db: f64,
    pub source_rate: f64,
    pub detected_rate: f64,
    pub geometric_recomputed_db: Option<f64>,
    pub target_precision_mrad: f64,
    pub visibility: f64,
    pub counts_needed: f64,
    pub acquisition_s: f64,
    pub acquisition_h: f64,
}

pub fn cmd_linkbudget(s: &LinkBudgetSection, out: &Path) -> Result<LinkReport, CliError> {
    if s.items.is_empty() {
        return Err(CliError::Config("linkbudget.items is empty".into()));
    }
    let b = LinkBudget {
        items: s.items.clone(),
        source_rate: s.source_rate,
    };
    let total_db = b.total_db()?;
    let detected_rate = b.detected_rate()?;
    let target = s.target_precision_mrad * 1e-3;
    let acquisition_s = acquisition_time(target, s.visibility, detected_rate)?;
    let geometric_recomputed_db = s
        .geometry
        .map(|g| geometric_loss(g.rx_aperture, g.divergence, g.range))
        .transpose()?;
    write_file(out, "linkbudget.txt", b.to_lines().as_bytes())?;
    Ok(LinkReport {
        items: b.items,
        total_db,
        source_rate: s.source_rate,
        detected_rate,
        geometric_recomputed_db,
        target_precision_mrad: s.target_precision_mrad,
        visibility: s.visibility,
        counts_needed: balanced_counts_for(target, s.visibility)?,
        acquisition_s,
        acquisition_h: acquisition_s / SECONDS_PER_HOUR,
    })
}

impl Render for LinkReport {
    fn text(&self) -> String {
        let w = self.items.iter().map(|i| i.name.chars().count()).max().unwrap_or(0).max(5);
        let mut out = format!("{:<w$}  loss (dB)\n", "Item");
        for i in &self.items {
            let _ = writeln!(out, "{:<w$}  {}", i.name, i.loss_db);
        }
        let _ = writeln!(out, "{:<w$}  {}", "Total", self.total_db);
        if let Some(g) = self.geometric_recomputed_db {
            let _ = writeln!(out, "geometric loss from aperture/divergence/range: {g:.2} dB");
        }
        let _ = writeln!(out, "detected rate: {:.2} Hz", self.detected_rate);
        let _ = writeln!(
            out,
            "{} mrad at V = {}: {:.0} counts, {:.1} s ({:.3} h)",
            self.target_precision_mrad, self.visibility, self.counts_needed, self.acquisition_s, self.acquisition_h
        );
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("item,loss_db\n");
        for i in &self.items {
            let _ = writeln!(out, "{},{}", i.name, i.loss_db);
        }
        let _ = writeln!(out, "Total,{}", self.total_db);
        out
    }
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub schema: &'static str,
    pub trials: usize,
    pub median_raw_std: f64,
    pub median_detrended_std: f64,
    pub median_slope: f64,
    pub summaries: Vec<CampaignSummary>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SimulateReport {
    Campaign {
        config: CampaignConfig,
        summary: CampaignSummary,
    },
    Ensemble {
        config: CampaignConfig,
        ensemble: EnsembleSummary,
    },
    Scan {
        points: usize,
        fit: FringeFit,
    },
}

/// Applies the section's inconsistency target to the campaign's detectors.
pub fn resolve_campaign(s: &SimulateSection, seed: u64) -> Result<CampaignConfig, CliError> {
    let mut cfg = match &s.campaign {
        Some(c) => c.clone(),
        None => CampaignConfig::urban_link()?,
    };
    cfg.seed = seed;
    if let Some(target) = s.inconsistency_target_mrad {
        let delta =
            SpadPair::mismatch_for_target(target * 1e-3, &cfg.attenuation, cfg.visibility, cfg.true_phase)?;
        let base = SpadModel {
            rate_efficiency_slope: 0.0,
            ..cfg.spads.a
        };
        cfg.spads = SpadPair::with_mismatch(base, delta);
    }
    Ok(cfg)
}

pub fn cmd_simulate(s: &SimulateSection, seed: u64, out: &Path) -> Result<SimulateReport, CliError> {
    match s.mode {
        SimulateMode::Scan => {
            let scan_cfg = s.scan.unwrap_or_default();
            let mut rng = SeededRng::for_trial(seed, 0, StreamKind::Measurement);
            let scan = simulate_fringe_scan(&scan_cfg, &mut rng)?;
            write_file(out, "fringe.csv", &csv_bytes(|b| formats::write_fringe(b, &scan))?)?;
            let fit = fit_visibility(&scan)?;
            let report = SimulateReport::Scan {
                points: scan.len(),
                fit,
            };
            write_file(out, "summary.json", &json_bytes(&report)?)?;
            Ok(report)
        }
        SimulateMode::Campaign => {
            if s.trials == 0 {
                return Err(CliError::Config("simulate.trials must be at least 1".into()));
            }
            let cfg = resolve_campaign(s, seed)?;
            let runs = run_ensemble(&cfg, s.trials)?;
            let first = &runs[0];
            write_file(out, "counts.csv", &csv_bytes(|b| formats::write_counts(b, &first.records))?)?;
            write_file(out, "phase.csv", &csv_bytes(|b| formats::write_phase(b, &first.phases))?)?;
            write_file(
                out,
                "attenuation.csv",
                &csv_bytes(|b| formats::write_attenuation(b, &first.transmittance))?,
            )?;
            let report = if runs.len() == 1 {
                SimulateReport::Campaign {
                    config: cfg,
                    summary: first.summary.clone(),
                }
            } else {
                let summaries: Vec<CampaignSummary> = runs.iter().map(|r| r.summary.clone()).collect();
                let pick = |f: fn(&CampaignSummary) -> f64| median(&summaries.iter().map(f).collect::<Vec<_>>());
                SimulateReport::Ensemble {
                    config: cfg,
                    ensemble: EnsembleSummary {
                        schema: ENSEMBLE_SCHEMA,
                        trials: summaries.len(),
                        median_raw_std: pick(|s| s.raw_std),
                        median_detrended_std: pick(|s| s.detrended_std),
                        median_slope: pick(|s| s.slope),
                        summaries,
                    },
                }
            };
            match &report {
                SimulateReport::Campaign { summary, .. } => write_file(out, "summary.json", &json_bytes(summary)?)?,
                SimulateReport::Ensemble { ensemble, .. } => write_file(out, "summary.json", &json_bytes(ensemble)?)?,
                SimulateReport::Scan { .. } => unreachable!(),
            };
            Ok(report)
        }
    }
}

fn summary_text(s: &CampaignSummary) -> String {
    format!(
        "samples            {} ({} clamped)\n\
         mean rate          {:.1} Hz\n\
         attenuation cv     {:.3}\n\
         shot noise (rms)   {:.2} mrad\n\
         raw STD            {:.2} mrad\n\
         detrended STD      {:.2} mrad\n\
         drift              {:.4} ± {:.4} mrad/s\n",
        s.n_samples,
        s.clamped_samples,
        s.mean_rate,
        s.attenuation_cv,
        s.shot_noise_rms * 1e3,
        s.raw_std * 1e3,
        s.detrended_std * 1e3,
        s.slope * 1e3,
        s.slope_sigma * 1e3
    )
}

const SUMMARY_COLUMNS: &str = "seed,n_samples,clamped_samples,mean_rate,attenuation_cv,shot_noise_rms,raw_std,detrended_std,slope,slope_sigma";

fn summary_row(s: &CampaignSummary) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        s.seed,
        s.n_samples,
        s.clamped_samples,
        s.mean_rate,
        s.attenuation_cv,
        s.shot_noise_rms,
        s.raw_std,
        s.detrended_std,
        s.slope,
        s.slope_sigma
    )
}

impl Render for SimulateReport {
    fn text(&self) -> String {
        match self {
            SimulateReport::Campaign { summary, .. } => summary_text(summary),
            SimulateReport::Ensemble { ensemble, .. } => format!(
                "trials                  {}\nmedian raw STD          {:.2} mrad\nmedian detrended STD    {:.2} mrad\nmedian drift            {:.4} mrad/s\n",
                ensemble.trials,
                ensemble.median_raw_std * 1e3,
                ensemble.median_detrended_std * 1e3,
                ensemble.median_slope * 1e3
            ),
            SimulateReport::Scan { points, fit } => format!(
                "points        {}\nvisibility    {:.4} ± {:.4}\nphase offset  {:.4} ± {:.4} rad\nchi2/dof      {:.2}\n",
                points,
                fit.visibility,
                fit.sigma_visibility,
                fit.phase_offset,
                fit.sigma_offset,
                fit.chi2 / fit.dof.max(1) as f64
            ),
        }
    }

    fn csv(&self) -> String {
        match self {
            SimulateReport::Campaign { summary, .. } => format!("# {SUMMARY_COLUMNS}\n{}", summary_row(summary)),
            SimulateReport::Ensemble { ensemble, .. } => {
                let mut out = format!("# trial,{SUMMARY_COLUMNS}\n");
                for (i, s) in ensemble.summaries.iter().enumerate() {
                    let _ = write!(out, "{i},{}", summary_row(s));
                }
                out
            }
            SimulateReport::Scan { fit, .. } => format!(
                "# visibility,sigma_visibility,phase_offset,sigma_offset,chi2,dof\n{},{},{},{},{},{}\n",
                fit.visibility, fit.sigma_visibility, fit.phase_offset, fit.sigma_offset, fit.chi2, fit.dof
            ),
        }
    }
}

// --------------------------------------------------------------------- fit

#[derive(Debug, Clone, Serialize)]
pub struct DriftFit {
    pub n: usize,
    pub raw_std: f64,
    #[serde(flatten)]
    pub detrend: Detrend,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThermalFit {
    pub quadratic: QuadraticFit,
    pub cte: CteLine,
    /// max |CTE| within ±0.2 °C of the zero crossing (1/K).
    pub max_abs_cte_near_zero: Option<f64>,
    pub reference_cte: f64,
    pub suppression_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttenuationStats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub cv: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct G2Stats {
    pub bins: usize,
    pub plateau: f64,
    pub g2_zero: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitReport {
    Fringe(FringeFit),
    Drift(DriftFit),
    Counts(DriftFit),
    Thermal(ThermalFit),
    Attenuation(AttenuationStats),
    G2(G2Stats),
}

fn csv_kind(k: FitKind) -> CsvKind {
    match k {
        FitKind::Fringe => CsvKind::Fringe,
        FitKind::Drift => CsvKind::Phase,
        FitKind::Counts => CsvKind::Counts,
        FitKind::Thermal => CsvKind::Thermal,
        FitKind::Attenuation => CsvKind::Attenuation,
        FitKind::G2 => CsvKind::G2,
    }
}

fn fit_kind(k: CsvKind) -> FitKind {
    match k {
        CsvKind::Fringe => FitKind::Fringe,
        CsvKind::Phase => FitKind::Drift,
        CsvKind::Counts => FitKind::Counts,
        CsvKind::Thermal => FitKind::Thermal,
        CsvKind::Attenuation => FitKind::Attenuation,
        CsvKind::G2 => FitKind::G2,
    }
}

fn drift_fit(series: &TimeSeries, out: &Path) -> Result<DriftFit, CliError> {
    let detrend = detrend_linear(series)?;
    let residuals = TimeSeries::new(series.t().to_vec(), detrend.residuals.clone())?;
    write_file(out, "residuals.csv", &csv_bytes(|b| formats::write_phase(b, &residuals))?)?;
    Ok(DriftFit {
        n: series.len(),
        raw_std: series.unwrapped().std(),
        detrend,
    })
}

/// Fits `text` (CSV) according to `kind`, or to the kind named by its header.
pub fn cmd_fit(s: &FitSection, text: &str, out: &Path) -> Result<FitReport, CliError> {
    let detected = CsvKind::detect(text);
    let kind = match (s.kind, detected) {
        (Some(k), Some(d)) if csv_kind(k) != d => {
            return Err(CliError::Config(format!(
                "fit kind {k:?} does not match the file header ({})",
                d.header()
            )))
        }
        (Some(k), _) => k,
        (None, Some(d)) => fit_kind(d),
        (None, None) => {
            return Err(CliError::Config(
                "cannot tell the file kind from its header; pass --kind".into(),
            ))
        }
    };
    let r = text.as_bytes();
    Ok(match kind {
        FitKind::Fringe => {
            let scan = formats::read_fringe(r)?;
            let fit = fit_visibility(&scan)?;
            let mut res = String::from("# phase_rad,observed,model\n");
            for (phi, rec) in &scan {
                let obs = (rec.c1 as f64 - rec.c2 as f64) / (rec.c1 + rec.c2).max(1) as f64;
                let model = fit.visibility * (phi + fit.phase_offset).cos();
                let _ = writeln!(res, "{phi},{obs},{model}");
            }
            write_file(out, "residuals.csv", res.as_bytes())?;
            FitReport::Fringe(fit)
        }
        FitKind::Drift => FitReport::Drift(drift_fit(&formats::read_phase(r)?, out)?),
        FitKind::Counts => {
            let recs = formats::read_counts(r)?;
            let phases = recs
                .iter()
                .map(|c| Ok(extract_phase(c.c1 as f64, c.c2 as f64, s.visibility)?.phase))
                .collect::<Result<Vec<f64>, CliError>>()?;
            let series = TimeSeries::new(recs.iter().map(|c| c.t).collect(), phases)?;
            write_file(out, "phase.csv", &csv_bytes(|b| formats::write_phase(b, &series))?)?;
            FitReport::Counts(drift_fit(&series, out)?)
        }
        FitKind::Thermal => {
            let scan = formats::read_thermal(r, s.arm_diff, s.wavelength)?;
            let quadratic = fit_phase_vs_temperature(&scan)?;
            let cte = cte_from_phase_fit(&quadratic, s.arm_diff, s.wavelength)?;
            let max_abs = cte.zero_crossing_temp.map(|z| cte.max_abs_cte_within(z - 0.2, z + 0.2));
            let ratio = match max_abs {
                Some(m) if m > 0.0 => Some(suppression_ratio(s.reference_cte, m)?),
                _ => None,
            };
            let mut res = String::from("# temperature_C,phase_rad,model\n");
            for (t, p) in scan.temperatures.iter().zip(&scan.phases) {
                let _ = writeln!(res, "{},{},{}", kelvin_to_celsius(*t), p, quadratic.eval(*t));
            }
            write_file(out, "residuals.csv", res.as_bytes())?;
            write_file(out, "cte.txt", cte.to_key_values().as_bytes())?;
            FitReport::Thermal(ThermalFit {
                quadratic,
                cte,
                max_abs_cte_near_zero: max_abs,
                reference_cte: s.reference_cte,
                suppression_ratio: ratio,
            })
        }
        FitKind::Attenuation => {
            let series = formats::read_attenuation(r)?;
            let v = series.values();
            let std = if v.len() > 1 { sample_std(v) } else { 0.0 };
            let mean = series.mean();
            FitReport::Attenuation(AttenuationStats {
                n: v.len(),
                mean,
                std,
                cv: std / mean,
                min: v.iter().copied().fold(f64::INFINITY, f64::min),
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        }
        FitKind::G2 => {
            let h = formats::read_g2(r)?;
            FitReport::G2(G2Stats {
                bins: h.delays.len(),
                plateau: h.plateau,
                g2_zero: h.g2_zero,
            })
        }
    })
}

impl Render for FitReport {
    fn text(&self) -> String {
        match self {
            FitReport::Fringe(f) => format!(
                "visibility    {:.4} ± {:.4}\nphase offset  {:.4} ± {:.4} rad\nchi2/dof      {:.3}\n",
                f.visibility,
                f.sigma_visibility,
                f.phase_offset,
                f.sigma_offset,
                f.chi2 / f.dof.max(1) as f64
            ),
            FitReport::Drift(d) | FitReport::Counts(d) => format!(
                "samples        {}\nslope          {:.5} ± {:.5} mrad/s\nintercept      {:.4} rad\nraw STD        {:.3} mrad\ndetrended STD  {:.3} mrad\n",
                d.n,
                d.detrend.slope * 1e3,
                d.detrend.sigma_slope * 1e3,
                d.detrend.intercept,
                d.raw_std * 1e3,
                d.detrend.residual_std * 1e3
            ),
            FitReport::Thermal(t) => {
                let mut out = format!(
                    "phase = a·x² + b·x + c, x = T − {:.3} °C\na = {:.6e} ± {:.1e} rad/K²\nb = {:.6e} ± {:.1e} rad/K\nR² = {:.5}\nCTE slope = {:.4} ppb/K²\n",
                    kelvin_to_celsius(t.quadratic.origin),
                    t.quadratic.a,
                    t.quadratic.sigma[0],
                    t.quadratic.b,
                    t.quadratic.sigma[1],
                    t.quadratic.r_squared,
                    t.cte.slope * 1e9
                );
                match t.cte.zero_crossing_temp {
                    Some(z) => {
                        let _ = writeln!(out, "zero crossing = {z:.3} °C");
                    }
                    None => out.push_str("zero crossing = none (no curvature)\n"),
                }
                if let Some(m) = t.max_abs_cte_near_zero {
                    let _ = writeln!(out, "max |CTE| within ±0.2 °C = {:.3} ppb/K", m * 1e9);
                }
                if let Some(r) = t.suppression_ratio {
                    let _ = writeln!(out, "suppression vs {} ppb/K = {:.1}", t.reference_cte * 1e9, r);
                }
                out
            }
            FitReport::Attenuation(a) => format!(
                "samples  {}\nmean     {:.6e}\nSTD/mean {:.4}\nrange    [{:.6e}, {:.6e}]\n",
                a.n, a.mean, a.cv, a.min, a.max
            ),
            FitReport::G2(g) => format!("bins {}\nplateau {:.2}\ng2(0) {:.4}\n", g.bins, g.plateau, g.g2_zero),
        }
    }

    fn csv(&self) -> String {
        match self {
            FitReport::Fringe(f) => format!(
                "# visibility,sigma_visibility,phase_offset,sigma_offset,chi2,dof\n{},{},{},{},{},{}\n",
                f.visibility, f.sigma_visibility, f.phase_offset, f.sigma_offset, f.chi2, f.dof
            ),
            FitReport::Drift(d) | FitReport::Counts(d) => format!(
                "# n,slope,sigma_slope,intercept,raw_std,residual_std\n{},{},{},{},{},{}\n",
                d.n, d.detrend.slope, d.detrend.sigma_slope, d.detrend.intercept, d.raw_std, d.detrend.residual_std
            ),
            FitReport::Thermal(t) => format!(
                "# a,b,c,origin_C,r_squared,cte_slope,zero_crossing_C\n{},{},{},{},{},{},{}\n",
                t.quadratic.a,
                t.quadratic.b,
                t.quadratic.c,
                kelvin_to_celsius(t.quadratic.origin),
                t.quadratic.r_squared,
                t.cte.slope,
                t.cte.zero_crossing_temp.map_or(String::new(), |z| z.to_string())
            ),
            FitReport::Attenuation(a) => {
                format!("# n,mean,std,cv,min,max\n{},{},{},{},{},{}\n", a.n, a.mean, a.std, a.cv, a.min, a.max)
            }
            FitReport::G2(g) => format!("# bins,plateau,g2_zero\n{},{},{}\n", g.bins, g.plateau, g.g2_zero),
        }
    }
}

// ---------------------------------------------------------------------- g2

#[derive(Debug, Clone, Serialize)]
pub struct G2Report {
    pub events_a: usize,
    pub events_b: usize,
    pub window: f64,
    pub bin: f64,
    pub plateau: f64,
    pub g2_zero: f64,
}

fn read_timestamps(path: &str) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::Core(franson_core::Error::Format {
                line: i + 1,
                reason: format!("{path}: not a timestamp: {line:?}"),
            })
        })?;
        out.push(v);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn cmd_g2(s: &G2Section, seed: u64, out: &Path) -> Result<G2Report, CliError> {
    let (a, b) = match &s.timestamps {
        Some([pa, pb]) => (read_timestamps(pa)?, read_timestamps(pb)?),
        None => simulate_hbt_stream(&s.source, seed)?,
    };
    let h = g2_correlation(&a, &b, s.window, s.bin)?;
    write_file(out, "g2.csv", &csv_bytes(|w| formats::write_g2(w, &h))?)?;
    let report = G2Report {
        events_a: a.len(),
        events_b: b.len(),
        window: s.window,
        bin: s.bin,
        plateau: h.plateau,
        g2_zero: h.g2_zero,
    };
    write_file(out, "summary.json", &json_bytes(&report)?)?;
    Ok(report)
}

impl Render for G2Report {
    fn text(&self) -> String {
        format!(
            "events     {} / {}\nplateau    {:.1} per {} ns bin\ng2(0)      {:.4}\n",
            self.events_a,
            self.events_b,
            self.plateau,
            self.bin * 1e9,
            self.g2_zero
        )
    }
    fn csv(&self) -> String {
        format!(
            "# events_a,events_b,window,bin,plateau,g2_zero\n{},{},{},{},{},{}\n",
            self.events_a, self.events_b, self.window, self.bin, self.plateau, self.g2_zero
        )
    }
}
