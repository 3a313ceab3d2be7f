//! Acceptance suite. Each criterion prints one PASS/FAIL line and fails its
//! test when any of its checks, including the runtime limit, misses.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use franson_core::budget::BudgetInputs;
use franson_core::calibration::{cte_from_phase_fit, fit_phase_vs_temperature, suppression_ratio, ule_demo_scan};
use franson_core::channel::{
    acquisition_time, axial_phase_noise, cn2_from_fried, geometric_loss, kolmogorov_psd, total_link_budget,
    AttenuationProcess, LinkBudget, TurbulenceParams,
};
use franson_core::detection::{
    extract_phase, fit_visibility, g2_correlation, shot_noise_phase, simulate_campaign, simulate_fringe_scan,
    simulate_hbt_stream, spad_inconsistency_noise, CampaignConfig, DetectionScheme, FringeScanConfig, HbtConfig,
    SpadModel, SpadPair, DUAL_SPAD_NOISE_PER_CV,
};
use franson_core::gravity::{precision_target, redshift_phase, redshift_phase_difference, OrbitPoint, RedshiftConfig};
use franson_core::rng::{poisson_sample, SeededRng};
use franson_core::series::sample_std;
use franson_core::state::detection_probabilities;
use franson_core::units::db_to_linear;
use franson_cli::commands::{cmd_budget, cmd_linkbudget, cmd_redshift, resolve_campaign};
use franson_cli::preset;

struct Check {
    label: String,
    ok: bool,
}

fn check(label: impl Into<String>, ok: bool) -> Check {
    Check {
        label: label.into(),
        ok,
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Check {
    check(format!("{label}={got:.6e} (want {want:e} ± {tol:e})"), (got - want).abs() <= tol)
}

fn in_range(label: &str, got: f64, lo: f64, hi: f64) -> Check {
    check(format!("{label}={got:.6e} in [{lo:e}, {hi:e}]"), (lo..=hi).contains(&got))
}

fn report(n: u32, title: &str, mut checks: Vec<Check>, elapsed: Duration, limit: Duration) {
    checks.push(check(format!("runtime {elapsed:.2?} < {limit:?}"), elapsed < limit));
    let ok = checks.iter().all(|c| c.ok);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.ok).map(|c| c.label.as_str()).collect();
    let mut out = format!("criterion {n} {title}: {}\n", if ok { "PASS" } else { "FAIL" });
    for c in &checks {
        out.push_str(&format!("    [{}] {}\n", if c.ok { "ok" } else { "xx" }, c.label));
    }
    print!("{out}");
    assert!(ok, "criterion {n} failed: {failed:?}");
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

#[test]
fn criterion_1_redshift() {
    let geo = preset("geo-50m").unwrap().redshift.unwrap();
    let ell = preset("elliptical-10k-20k").unwrap().redshift.unwrap();

    let start = Instant::now();
    let g = redshift_phase(&RedshiftConfig::satellite(), &OrbitPoint::at_altitude(35_786e3)).unwrap();
    let d = redshift_phase_difference(
        &RedshiftConfig::satellite(),
        &OrbitPoint::at_altitude(10_000e3),
        &OrbitPoint::at_altitude(20_000e3),
    )
    .unwrap();
    let target = precision_target(208e-3, 5.0).unwrap();
    let elapsed = start.elapsed();

    let geo_r = cmd_redshift(&geo).unwrap();
    let ell_r = cmd_redshift(&ell).unwrap();
    report(
        1,
        "redshift",
        vec![
            within("geo phase", g, 208e-3, 1e-3),
            within("geo preset phase", geo_r.points[0].phase_rad, 208e-3, 1e-3),
            within("elliptical difference", d, 36.2e-3, 0.4e-3),
            within("elliptical preset difference", ell_r.difference_rad.unwrap(), 36.2e-3, 0.4e-3),
            within("5 sigma target", target, 41.6e-3, 1e-15),
        ],
        elapsed,
        Duration::from_millis(1),
    );
}

#[test]
fn criterion_2_noise_budget() {
    const REL_TOL: f64 = 0.10;
    let expected = [
        ("Photon's center wavelength", 0.002),
        ("Air pressure (transmitter)", 0.08),
        ("Air pressure (receiver)", 0.1),
        ("Temperature", 0.137),
        ("Atmospheric turbulence (transverse)", 0.3),
        ("Atmospheric turbulence (axial)", 0.001),
        ("Shot noise", 4.3),
        ("Inconsistency of SPADs", 15.6),
    ];
    let section = preset("reference-budget").unwrap().budget.unwrap();
    let dir = tempfile::TempDir::new().unwrap();

    let start = Instant::now();
    let report_ = cmd_budget(&section, dir.path()).unwrap();
    let elapsed = start.elapsed();

    let b = &report_.budget;
    let mut checks = vec![check(format!("{} rows", b.sources.len()), b.sources.len() == expected.len())];
    for (src, (name, want)) in b.sources.iter().zip(expected) {
        let shown = src.display_rounded();
        checks.push(check(
            format!("{name}: {} (raw {:.4e}, want {want})", src.formatted(), src.display_value()),
            src.name == name && (shown - want).abs() <= REL_TOL * want,
        ));
    }
    checks.push(within("quadrature total", b.quadrature_total.unwrap(), 16.2e-3, 0.2e-3));
    let defaults = BudgetInputs::default().evaluate().unwrap();
    checks.push(check("preset equals built-in defaults", defaults.quadrature_total == b.quadrature_total));
    report(2, "noise budget", checks, elapsed, Duration::from_secs(1));
}

#[test]
fn criterion_3_turbulence() {
    let start = Instant::now();
    let cn2 = cn2_from_fried(0.053, 671e-9, 8.4e3).unwrap();
    let p = TurbulenceParams {
        cn2,
        ..TurbulenceParams::urban_link()
    };
    let psd = kolmogorov_psd(0.25e9, &p).unwrap();
    let axial = axial_phase_noise(&p, 0.25e9).unwrap();
    let elapsed = start.elapsed();

    report(
        3,
        "turbulence",
        vec![
            within("Cn2", cn2, 4.5e-16, 0.1 * 4.5e-16),
            within("PSD at 0.25 GHz", psd, 1.7e-21, 0.1 * 1.7e-21),
            check(
                format!("axial rms {:.3e} (single-frequency {:.3e}) < 2e-6", axial.integrated_rms, axial.single_frequency_rms),
                axial.integrated_rms < 2e-6 && axial.single_frequency_rms < 2e-6,
            ),
        ],
        elapsed,
        Duration::from_millis(1),
    );
}

#[test]
fn criterion_4_link_budget() {
    let section = preset("geo-link").unwrap().linkbudget.unwrap();
    let g = section.geometry.clone().unwrap();

    let start = Instant::now();
    let b = LinkBudget::geo_satellite();
    let total = total_link_budget(&b).unwrap();
    let geo = geometric_loss(g.rx_aperture, g.divergence, g.range).unwrap();
    let hours = acquisition_time(4.3e-3, 0.863, 0.4e9 * db_to_linear(total)).unwrap() / 3600.0;
    let elapsed = start.elapsed();

    let dir = tempfile::TempDir::new().unwrap();
    let cli = cmd_linkbudget(&section, dir.path()).unwrap();
    report(
        4,
        "link budget",
        vec![
            check(format!("total {total} dB == 67.5"), total == 67.5),
            check(format!("preset total {} dB == 67.5", cli.total_db), cli.total_db == 67.5),
            within("geometric dB", geo, 59.0, 0.2),
            in_range("acquisition h", hours, 0.22, 0.34),
            check("preset acquisition agrees", (cli.acquisition_h - hours).abs() < 1e-12),
        ],
        elapsed,
        Duration::from_millis(1),
    );
}

#[test]
fn criterion_5_campaign_ensemble() {
    const SEEDS: u64 = 100;
    let section = preset("urban-campaign").unwrap().simulate.unwrap();

    let start = Instant::now();
    let runs: Vec<_> = (0..SEEDS)
        .map(|seed| simulate_campaign(&resolve_campaign(&section, seed).unwrap()).unwrap().summary)
        .collect();
    let elapsed = start.elapsed();

    let raw = median(runs.iter().map(|s| s.raw_std).collect());
    let det = median(runs.iter().map(|s| s.detrended_std).collect());
    let slope = median(runs.iter().map(|s| s.slope).collect());
    report(
        5,
        "campaign Monte Carlo",
        vec![
            in_range("median raw std", raw, 27e-3, 45e-3),
            in_range("median detrended std", det, 14e-3, 19e-3),
            within("median slope", slope, 0.117e-3, 0.03e-3),
            check(
                "every trial slope within band",
                runs.iter().all(|s| (s.slope - 0.117e-3).abs() <= 0.03e-3),
            ),
        ],
        elapsed,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_6_detector_schemes() {
    const SHOT_REL_TOL: f64 = 0.15;
    let start = Instant::now();
    let mut checks = Vec::new();

    // Fixed attenuation over the measured count range, both schemes.
    for scheme in [DetectionScheme::dual(), DetectionScheme::single()] {
        for (i, counts) in [1.1e4, 1.1e5, 1.1e6].into_iter().enumerate() {
            let cfg = CampaignConfig {
                duration: 400.0,
                sample_period: 1.0,
                true_phase: FRAC_PI_2,
                drift_rate: 0.0,
                visibility: 0.863,
                detected_mean_rate: counts,
                scheme,
                attenuation: AttenuationProcess::constant(30.0),
                spads: SpadPair::matched(SpadModel::default()),
                seed: 60 + i as u64,
                trial: 0,
            };
            let r = simulate_campaign(&cfg).unwrap();
            let n = r.records.len() as f64;
            let c1 = r.records.iter().map(|c| c.c1 as f64).sum::<f64>() / n;
            let c2 = r.records.iter().map(|c| c.c2 as f64).sum::<f64>() / n;
            let formula = shot_noise_phase(c1, c2, cfg.visibility).unwrap();
            let got = r.summary.detrended_std;
            checks.push(check(
                format!("{:?} at {counts:e} counts: {got:.3e} vs formula {formula:.3e}", scheme.kind),
                (got / formula - 1.0).abs() <= SHOT_REL_TOL,
            ));
        }
    }

    // 7 dB peak-to-peak, 38 s period, no extra fading.
    let mut att = AttenuationProcess {
        mean_loss: 30.0,
        modulation_amplitude: 7.0,
        modulation_period: 38.0,
        stochastic_cv: 0.0,
    };
    att.stochastic_cv = att.modulation_cv();
    checks.push(check(
        format!("modulation-only log-normal sigma {:?}", att.lognormal_sigma()),
        att.lognormal_sigma().is_ok_and(|s| s == 0.0),
    ));
    for (scheme, bound, is_dual) in [(DetectionScheme::dual(), 5.0, true), (DetectionScheme::single(), 2.5, false)] {
        let cfg = CampaignConfig {
            attenuation: att,
            seed: 66,
            ..CampaignConfig::lab(scheme).unwrap()
        };
        let s = simulate_campaign(&cfg).unwrap().summary;
        let ratio = s.detrended_std / s.shot_noise_rms;
        let (label, ok) = if is_dual {
            ("dual >=", ratio >= bound)
        } else {
            ("single <=", ratio <= bound)
        };
        checks.push(check(
            format!("{label} {bound} x shot: std {:.3e}, shot {:.3e}, ratio {ratio:.2}", s.detrended_std, s.shot_noise_rms),
            ok,
        ));
    }

    let dual = DetectionScheme::dual();
    checks.push(within(
        "dual inconsistency at cv 0.52",
        spad_inconsistency_noise(&dual, 0.52, DUAL_SPAD_NOISE_PER_CV).unwrap(),
        11.4e-3,
        0.05e-3,
    ));
    checks.push(within(
        "dual inconsistency at cv 0.71",
        spad_inconsistency_noise(&dual, 0.71, DUAL_SPAD_NOISE_PER_CV).unwrap(),
        15.6e-3,
        0.05e-3,
    ));
    let elapsed = start.elapsed();
    report(6, "detector schemes", checks, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_7_estimators() {
    const DRAWS: usize = 100_000;
    let start = Instant::now();
    let mut checks = Vec::new();

    let mut rng = SeededRng::new(70, 0);
    for (c1, c2, v) in [(36_300.0, 36_300.0, 0.863), (8e4, 2e4, 0.863), (3e3, 9e3, 0.7)] {
        let phases: Vec<f64> = (0..DRAWS)
            .map(|_| {
                let a = poisson_sample(&mut rng, c1).unwrap() as f64;
                let b = poisson_sample(&mut rng, c2).unwrap() as f64;
                ((a - b) / (v * (a + b))).clamp(-1.0, 1.0).acos()
            })
            .collect();
        let oracle = sample_std(&phases);
        let formula = shot_noise_phase(c1, c2, v).unwrap();
        checks.push(check(
            format!("resampling ({c1},{c2},{v}): {oracle:.4e} vs {formula:.4e}"),
            (oracle / formula - 1.0).abs() <= 0.05,
        ));
    }

    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let phi = 0.01 + (std::f64::consts::PI - 0.02) * i as f64 / 200.0;
        for v in [0.5, 0.863, 1.0] {
            let (p1, p2) = detection_probabilities(phi, v).unwrap();
            let est = extract_phase(p1 * 1e6, p2 * 1e6, v).unwrap();
            worst = worst.max((est.phase - phi).abs());
        }
    }
    checks.push(check(format!("extract(forward(phi)) max error {worst:.2e} <= 1e-9"), worst <= 1e-9));

    let scan_cfg = FringeScanConfig {
        visibility: 0.863,
        phase_offset: 0.3,
        counts_per_point: 1e5,
        points: 16,
        cycles: 1.0,
    };
    let scan = simulate_fringe_scan(&scan_cfg, &mut SeededRng::new(71, 0)).unwrap();
    let fit = fit_visibility(&scan).unwrap();
    // Poisson floor for a uniform scan: 1 / sqrt(P N <cos² / (1 − V² cos²)>).
    let a = scan_cfg.visibility.powi(2);
    let mean_w = ((1.0 - a).powf(-0.5) - 1.0) / a;
    let floor = 1.0 / (scan_cfg.points as f64 * scan_cfg.counts_per_point * mean_w).sqrt();
    checks.push(within("fringe V", fit.visibility, 0.863, 0.01));
    checks.push(check(
        format!("fringe sigma_V={:.4e} in [1e-3, 1.6e-2] (Poisson floor {floor:.4e})", fit.sigma_visibility),
        (1e-3..=1.6e-2).contains(&fit.sigma_visibility),
    ));

    let hbt = HbtConfig::for_g2(0.071).unwrap();
    let (a, b) = simulate_hbt_stream(&hbt, 72).unwrap();
    let h = g2_correlation(&a, &b, 10e-6, 10e-9).unwrap();
    checks.push(within("g2(0)", h.g2_zero, 0.071, 0.01));

    let elapsed = start.elapsed();
    report(7, "estimators", checks, elapsed, Duration::from_secs(60));
}

#[test]
fn criterion_8_calibration() {
    let start = Instant::now();
    let scan = ule_demo_scan(0.3e-3, &mut SeededRng::new(80, 0)).unwrap();
    let q = fit_phase_vs_temperature(&scan).unwrap();
    let line = cte_from_phase_fit(&q, scan.arm_diff, scan.wavelength).unwrap();
    let ratio = suppression_ratio(550e-9, 1.4e-9).unwrap();
    let elapsed = start.elapsed();

    let z = line.zero_crossing_temp.unwrap_or(f64::NAN);
    let worst = line.max_abs_cte_within(z - 0.2, z + 0.2);
    report(
        8,
        "calibration",
        vec![
            within("zero crossing C", z, 23.87, 0.05),
            check(format!("max |CTE| within ±0.2 C = {worst:.3e} <= 1.4e-9"), worst <= 1.4e-9),
            within("suppression ratio", ratio, 393.0, 0.5),
        ],
        elapsed,
        Duration::from_secs(1),
    );
}
