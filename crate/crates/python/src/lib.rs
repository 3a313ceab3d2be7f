//! Python bindings. Reports come back as plain dicts and lists.

use franson_core::budget::BudgetInputs;
use franson_core::calibration::{cte_from_phase_fit, fit_phase_vs_temperature, suppression_ratio, ThermalScan};
use franson_core::channel::{self, LinkBudget, LinkItem, TurbulenceParams};
use franson_core::detection::{self, CampaignConfig, CountRecord, DetectionScheme, HbtConfig};
use franson_core::gravity::{self, OrbitPoint, RedshiftConfig};
use franson_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::Format { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn redshift_config(delta_l: f64, wavelength: f64) -> RedshiftConfig {
    RedshiftConfig { delta_l, wavelength }
}

/// Redshift phase (rad) at `altitude` metres.
#[pyfunction]
#[pyo3(signature = (altitude, delta_l = 50.0, wavelength = 893.2e-9))]
fn redshift_phase(altitude: f64, delta_l: f64, wavelength: f64) -> PyResult<f64> {
    gravity::redshift_phase(&redshift_config(delta_l, wavelength), &OrbitPoint::at_altitude(altitude)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h1, h2, delta_l = 50.0, wavelength = 893.2e-9))]
fn redshift_phase_difference(h1: f64, h2: f64, delta_l: f64, wavelength: f64) -> PyResult<f64> {
    gravity::redshift_phase_difference(
        &redshift_config(delta_l, wavelength),
        &OrbitPoint::at_altitude(h1),
        &OrbitPoint::at_altitude(h2),
    )
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (radial_velocity, delta_l = 50.0, wavelength = 893.2e-9))]
fn doppler_phase(radial_velocity: f64, delta_l: f64, wavelength: f64) -> PyResult<f64> {
    gravity::doppler_phase(&redshift_config(delta_l, wavelength), radial_velocity).map_err(err)
}

#[pyfunction]
fn precision_target(signal: f64, n_sigma: f64) -> PyResult<f64> {
    gravity::precision_target(signal, n_sigma).map_err(err)
}

/// Default noise budget: {"sources": [...], "quadrature_total": ...}.
#[pyfunction]
fn noise_budget(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let b = BudgetInputs::default().evaluate().map_err(err)?;
    to_py(py, &b)
}

#[pyfunction]
fn noise_budget_table() -> PyResult<String> {
    Ok(BudgetInputs::default().evaluate().map_err(err)?.to_table())
}

#[pyfunction]
fn shot_noise_phase(c1: f64, c2: f64, visibility: f64) -> PyResult<f64> {
    detection::shot_noise_phase(c1, c2, visibility).map_err(err)
}

/// Returns (phase, clamped).
#[pyfunction]
fn extract_phase(c1: f64, c2: f64, visibility: f64) -> PyResult<(f64, bool)> {
    let e = detection::extract_phase(c1, c2, visibility).map_err(err)?;
    Ok((e.phase, e.clamped))
}

/// Fit of (c1 − c2)/(c1 + c2) = V cos(φ + offset) over a phase scan.
#[pyfunction]
fn fit_visibility<'py>(py: Python<'py>, phases: Vec<f64>, c1: Vec<u64>, c2: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    if phases.len() != c1.len() || phases.len() != c2.len() {
        return Err(PyValueError::new_err("phases, c1 and c2 differ in length"));
    }
    let scan: Vec<(f64, CountRecord)> = phases
        .iter()
        .zip(c1.iter().zip(&c2))
        .enumerate()
        .map(|(i, (&p, (&a, &b)))| (p, CountRecord { t: i as f64, c1: a, c2: b }))
        .collect();
    to_py(py, &detection::fit_visibility(&scan).map_err(err)?)
}

#[pyfunction]
fn cn2_from_fried(r0: f64, wavelength: f64, path_len: f64) -> PyResult<f64> {
    channel::cn2_from_fried(r0, wavelength, path_len).map_err(err)
}

/// Kolmogorov phase PSD (rad²/Hz) for the urban link with the given Cn².
#[pyfunction]
#[pyo3(signature = (f, cn2 = 4.5e-16))]
fn kolmogorov_psd(f: f64, cn2: f64) -> PyResult<f64> {
    let p = TurbulenceParams {
        cn2,
        ..TurbulenceParams::urban_link()
    };
    channel::kolmogorov_psd(f, &p).map_err(err)
}

/// Link budget report. `items` defaults to the geostationary table.
#[pyfunction]
#[pyo3(signature = (items = None, source_rate = 0.4e9, target = 4.3e-3, visibility = 0.863))]
fn link_budget<'py>(
    py: Python<'py>,
    items: Option<Vec<(String, f64)>>,
    source_rate: f64,
    target: f64,
    visibility: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let b = match items {
        Some(items) => LinkBudget {
            items: items.into_iter().map(|(n, l)| LinkItem::new(n, l)).collect(),
            source_rate,
        },
        None => LinkBudget {
            source_rate,
            ..LinkBudget::geo_satellite()
        },
    };
    let total = channel::total_link_budget(&b).map_err(err)?;
    let rate = b.detected_rate().map_err(err)?;
    let t = channel::acquisition_time(target, visibility, rate).map_err(err)?;
    #[derive(Serialize)]
    struct Report {
        total_db: f64,
        detected_rate: f64,
        acquisition_s: f64,
    }
    to_py(
        py,
        &Report {
            total_db: total,
            detected_rate: rate,
            acquisition_s: t,
        },
    )
}

#[pyfunction]
fn geometric_loss(rx_aperture: f64, divergence: f64, range: f64) -> PyResult<f64> {
    channel::geometric_loss(rx_aperture, divergence, range).map_err(err)
}

/// Campaign settings. Start from `urban_link()` or `lab(scheme)` and adjust.
#[pyclass(name = "CampaignConfig", skip_from_py_object)]
struct PyCampaignConfig {
    inner: CampaignConfig,
}

#[pymethods]
impl PyCampaignConfig {
    #[staticmethod]
    fn urban_link() -> PyResult<Self> {
        Ok(Self {
            inner: CampaignConfig::urban_link().map_err(err)?,
        })
    }

    /// `scheme` is "dual" or "single".
    #[staticmethod]
    #[pyo3(signature = (scheme = "dual"))]
    fn lab(scheme: &str) -> PyResult<Self> {
        let s = match scheme {
            "dual" => DetectionScheme::dual(),
            "single" => DetectionScheme::single(),
            other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
        };
        Ok(Self {
            inner: CampaignConfig::lab(s).map_err(err)?,
        })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[setter]
    fn set_seed(&mut self, v: u64) {
        self.inner.seed = v;
    }
    #[getter]
    fn duration(&self) -> f64 {
        self.inner.duration
    }
    #[setter]
    fn set_duration(&mut self, v: f64) {
        self.inner.duration = v;
    }
    #[getter]
    fn sample_period(&self) -> f64 {
        self.inner.sample_period
    }
    #[setter]
    fn set_sample_period(&mut self, v: f64) {
        self.inner.sample_period = v;
    }
    #[getter]
    fn drift_rate(&self) -> f64 {
        self.inner.drift_rate
    }
    #[setter]
    fn set_drift_rate(&mut self, v: f64) {
        self.inner.drift_rate = v;
    }
    #[getter]
    fn visibility(&self) -> f64 {
        self.inner.visibility
    }
    #[setter]
    fn set_visibility(&mut self, v: f64) {
        self.inner.visibility = v;
    }
    #[getter]
    fn detected_mean_rate(&self) -> f64 {
        self.inner.detected_mean_rate
    }
    #[setter]
    fn set_detected_mean_rate(&mut self, v: f64) {
        self.inner.detected_mean_rate = v;
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "CampaignConfig(duration={}, sample_period={}, seed={})",
            self.inner.duration, self.inner.sample_period, self.inner.seed
        )
    }
}

/// Runs one campaign: {"summary": {...}, "t": [...], "phase": [...], "c1": [...], "c2": [...]}.
#[pyfunction]
fn simulate_campaign<'py>(py: Python<'py>, config: &PyCampaignConfig) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| detection::simulate_campaign(&config.inner)).map_err(err)?;
    #[derive(Serialize)]
    struct Out<'a> {
        summary: &'a detection::CampaignSummary,
        t: &'a [f64],
        phase: &'a [f64],
        c1: Vec<u64>,
        c2: Vec<u64>,
    }
    to_py(
        py,
        &Out {
            summary: &r.summary,
            t: r.phases.t(),
            phase: r.phases.values(),
            c1: r.records.iter().map(|c| c.c1).collect(),
            c2: r.records.iter().map(|c| c.c2).collect(),
        },
    )
}

/// Summaries of trials 0..trials.
#[pyfunction]
fn run_ensemble<'py>(py: Python<'py>, config: &PyCampaignConfig, trials: u64) -> PyResult<Bound<'py, PyAny>> {
    let runs = py.detach(|| detection::run_ensemble(&config.inner, trials)).map_err(err)?;
    let summaries: Vec<_> = runs.into_iter().map(|r| r.summary).collect();
    to_py(py, &summaries)
}

#[pyfunction]
fn spad_inconsistency_noise(attenuation_cv: f64, single: bool) -> PyResult<f64> {
    let scheme = if single {
        DetectionScheme::single()
    } else {
        DetectionScheme::dual()
    };
    detection::spad_inconsistency_noise(&scheme, attenuation_cv, detection::DUAL_SPAD_NOISE_PER_CV).map_err(err)
}

/// Simulated HBT measurement of a source with the given g²(0); returns the
/// estimated g²(0).
#[pyfunction]
#[pyo3(signature = (g2, seed = 0, duration = 5.0))]
fn simulate_g2(py: Python<'_>, g2: f64, seed: u64, duration: f64) -> PyResult<f64> {
    let cfg = HbtConfig {
        duration,
        ..HbtConfig::for_g2(g2).map_err(err)?
    };
    py.detach(|| {
        let (a, b) = detection::simulate_hbt_stream(&cfg, seed)?;
        detection::g2_correlation(&a, &b, 10e-6, 10e-9)
    })
    .map(|h| h.g2_zero)
    .map_err(err)
}

/// Normalized start-stop histogram of two sorted timestamp lists.
#[pyfunction]
#[pyo3(signature = (a, b, window = 10e-6, bin = 10e-9))]
fn g2_correlation<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>, window: f64, bin: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &detection::g2_correlation(&a, &b, window, bin).map_err(err)?)
}

/// Quadratic phase-vs-temperature fit and the CTE line it implies.
#[pyfunction]
#[pyo3(signature = (temps_c, phases, arm_diff = 0.8, wavelength = 1550e-9))]
fn fit_thermal_scan<'py>(
    py: Python<'py>,
    temps_c: Vec<f64>,
    phases: Vec<f64>,
    arm_diff: f64,
    wavelength: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let scan = ThermalScan::from_celsius(&temps_c, phases, arm_diff, wavelength).map_err(err)?;
    let fit = fit_phase_vs_temperature(&scan).map_err(err)?;
    let cte = cte_from_phase_fit(&fit, arm_diff, wavelength).map_err(err)?;
    #[derive(Serialize)]
    struct Out {
        fit: franson_core::calibration::QuadraticFit,
        cte: franson_core::calibration::CteLine,
    }
    to_py(py, &Out { fit, cte })
}

#[pyfunction(name = "suppression_ratio")]
fn py_suppression_ratio(cte_a: f64, cte_b: f64) -> PyResult<f64> {
    suppression_ratio(cte_a, cte_b).map_err(err)
}

#[pymodule]
fn franson(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCampaignConfig>()?;
    m.add_function(wrap_pyfunction!(redshift_phase, m)?)?;
    m.add_function(wrap_pyfunction!(redshift_phase_difference, m)?)?;
    m.add_function(wrap_pyfunction!(doppler_phase, m)?)?;
    m.add_function(wrap_pyfunction!(precision_target, m)?)?;
    m.add_function(wrap_pyfunction!(noise_budget, m)?)?;
    m.add_function(wrap_pyfunction!(noise_budget_table, m)?)?;
    m.add_function(wrap_pyfunction!(shot_noise_phase, m)?)?;
    m.add_function(wrap_pyfunction!(extract_phase, m)?)?;
    m.add_function(wrap_pyfunction!(fit_visibility, m)?)?;
    m.add_function(wrap_pyfunction!(cn2_from_fried, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_psd, m)?)?;
    m.add_function(wrap_pyfunction!(link_budget, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_loss, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(spad_inconsistency_noise, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_g2, m)?)?;
    m.add_function(wrap_pyfunction!(g2_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(fit_thermal_scan, m)?)?;
    m.add_function(wrap_pyfunction!(py_suppression_ratio, m)?)?;
    Ok(())
}
