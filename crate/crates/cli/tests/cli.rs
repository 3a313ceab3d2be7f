use std::fs;
use std::path::Path;
use std::process::Command;

use franson_cli::{run_from, CliError};
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn run(args: &[&str], out: &Path) -> Result<String, CliError> {
    let mut full = vec!["franson", "--out", out.to_str().unwrap()];
    full.extend_from_slice(args);
    run_from(full)
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn checksums(dir: &Path) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let digest = Sha256::digest(fs::read(&p).unwrap());
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            (p.file_name().unwrap().to_string_lossy().into_owned(), hex)
        })
        .collect();
    out.sort();
    out
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn simulate_is_byte_reproducible() {
    let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    run(&["simulate", "--preset", "urban-campaign", "--seed", "7"], a.path()).unwrap();
    run(&["simulate", "--preset", "urban-campaign", "--seed", "7"], b.path()).unwrap();
    run(&["simulate", "--preset", "urban-campaign", "--seed", "8"], c.path()).unwrap();
    let (ha, hb, hc) = (checksums(a.path()), checksums(b.path()), checksums(c.path()));
    assert_eq!(ha, hb);
    assert!(ha.iter().any(|(n, _)| n == "counts.csv") && ha.iter().any(|(n, _)| n == "resolved.toml"));
    let counts = |h: &[(String, String)]| h.iter().find(|(n, _)| n == "counts.csv").unwrap().1.clone();
    assert_ne!(counts(&ha), counts(&hc));
}

#[test]
fn resolved_config_reruns_identically() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run(&["simulate", "--preset", "urban-campaign"], a.path()).unwrap();
    let resolved = a.path().join("resolved.toml").display().to_string();
    run(&["simulate", "--config", &resolved], b.path()).unwrap();
    assert_eq!(checksums(a.path()), checksums(b.path()));
}

#[test]
fn urban_campaign_seed_one() {
    let d = TempDir::new().unwrap();
    let out = run(&["simulate", "--preset", "urban-campaign", "--format", "json"], d.path()).unwrap();
    let v = json(&out);
    let det = v["summary"]["detrended_std"].as_f64().unwrap();
    assert!((13.8e-3..=18.6e-3).contains(&det), "{det}");
    let summary = json(&fs::read_to_string(d.path().join("summary.json")).unwrap());
    assert_eq!(summary["schema"], "franson.campaign-summary/1");
    assert_eq!(summary["seed"], 1);
    assert_eq!(summary["n_samples"], 94);
}

#[test]
fn noiseless_campaign() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        r#"
[simulate.campaign]
duration = 100.0
sample_period = 1.0
true_phase = 1.2
drift_rate = 1e-4
visibility = 0.95
detected_mean_rate = 1e12
attenuation = { mean_loss = 10.0, modulation_amplitude = 0.0, modulation_period = 1.0, stochastic_cv = 0.0 }
"#,
    );
    let out = d.path().join("out");
    let v = json(&run(&["simulate", "--config", &cfg, "--format", "json"], &out).unwrap());
    assert!(v["summary"]["detrended_std"].as_f64().unwrap() < 0.1e-3);
    assert!((v["summary"]["slope"].as_f64().unwrap() - 1e-4).abs() < 1e-7);
}

#[test]
fn emitted_csvs_round_trip_through_fit() {
    let d = TempDir::new().unwrap();
    let sim = json(&run(&["simulate", "--preset", "urban-campaign", "--format", "json"], d.path()).unwrap());
    let fit_dir = d.path().join("fit");
    let phase = d.path().join("phase.csv").display().to_string();
    let v = json(&run(&["fit", &phase, "--format", "json"], &fit_dir).unwrap());
    assert_eq!(v["kind"], "drift");
    assert_eq!(v["slope"], sim["summary"]["slope"]);
    assert_eq!(v["residual_std"], sim["summary"]["detrended_std"]);
    let counts = d.path().join("counts.csv").display().to_string();
    let v = json(&run(&["fit", &counts, "--format", "json"], &fit_dir).unwrap());
    assert_eq!(v["kind"], "counts");
    assert_eq!(v["slope"], sim["summary"]["slope"]);
    let att = d.path().join("attenuation.csv").display().to_string();
    let v = json(&run(&["fit", &att, "--format", "json"], &fit_dir).unwrap());
    assert_eq!(v["cv"], sim["summary"]["attenuation_cv"]);
}

#[test]
fn fringe_scan_closed_loop() {
    let d = TempDir::new().unwrap();
    let sim = json(&run(&["simulate", "--preset", "fringe-scan", "--format", "json"], d.path()).unwrap());
    let fringe = d.path().join("fringe.csv").display().to_string();
    let v = json(&run(&["fit", &fringe, "--format", "json"], &d.path().join("fit")).unwrap());
    assert_eq!(v["kind"], "fringe");
    assert_eq!(v["visibility"], sim["fit"]["visibility"]);
    let vis = v["visibility"].as_f64().unwrap();
    let sig = v["sigma_visibility"].as_f64().unwrap();
    assert!((vis - 0.863).abs() < 4.0 * sig, "{vis} ± {sig}");
}

#[test]
fn fit_constant_phase_and_thermal() {
    let d = TempDir::new().unwrap();
    let mut phase = String::from("# t,phase_rad\n");
    for i in 0..20 {
        phase.push_str(&format!("{},0.7\n", i as f64 * 10.0));
    }
    fs::write(d.path().join("const.csv"), phase).unwrap();
    let p = d.path().join("const.csv").display().to_string();
    let v = json(&run(&["fit", &p, "--format", "json"], d.path()).unwrap());
    assert!(v["slope"].as_f64().unwrap().abs() < 1e-15);

    let mut thermal = String::from("# temperature_C,phase_rad\n");
    let k = 2.0 * std::f64::consts::PI * 0.8 / 1550e-9;
    for i in 0..=24 {
        let t = 21.0 + 0.25 * i as f64;
        thermal.push_str(&format!("{t},{}\n", 0.5 * k * 6.8e-9 * (t - 23.87f64).powi(2)));
    }
    fs::write(d.path().join("thermal.csv"), thermal).unwrap();
    let p = d.path().join("thermal.csv").display().to_string();
    let v = json(&run(&["fit", &p, "--format", "json"], d.path()).unwrap());
    assert_eq!(v["kind"], "thermal");
    assert!((v["cte"]["zero_crossing_temp"].as_f64().unwrap() - 23.87).abs() < 1e-6);
    let cte = fs::read_to_string(d.path().join("cte.txt")).unwrap();
    assert!(cte.contains("zero_crossing_c = 23.87"), "{cte}");
}

#[test]
fn fit_rejects_bad_input() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("bad.csv"), "# t,c1,c2\n0,1,2\n1,oops,3\n").unwrap();
    let p = d.path().join("bad.csv").display().to_string();
    let err = run(&["fit", &p], d.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
    fs::write(d.path().join("short.csv"), "# t,phase_rad\n0,1\n1,1\n").unwrap();
    let p = d.path().join("short.csv").display().to_string();
    assert_eq!(run(&["fit", &p], d.path()).unwrap_err().exit_code(), 3);
    fs::write(d.path().join("bare.csv"), "0,1\n1,1\n").unwrap();
    let p = d.path().join("bare.csv").display().to_string();
    assert_eq!(run(&["fit", &p], d.path()).unwrap_err().exit_code(), 2);
    let p = d.path().join("short.csv").display().to_string();
    assert_eq!(run(&["fit", &p, "--kind", "counts"], d.path()).unwrap_err().exit_code(), 2);
}

#[test]
fn strict_config_names_unknown_key() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "[budget.inputs]\nwavelenght = 1e-6\n");
    let err = run(&["budget", "--config", &cfg], d.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("wavelenght"), "{err}");
    let err = run(&["budget", "--preset", "geo-50m"], d.path()).unwrap_err();
    assert!(err.to_string().contains("[budget]"), "{err}");
    assert_eq!(run(&["redshift", "--preset", "nope"], d.path()).unwrap_err().exit_code(), 2);
}

#[test]
fn redshift_reports() {
    let d = TempDir::new().unwrap();
    let v = json(&run(&["redshift", "--preset", "geo-50m", "--format", "json"], d.path()).unwrap());
    assert!((v["points"][0]["phase_rad"].as_f64().unwrap() - 0.208).abs() < 1e-3);
    let v = json(&run(&["redshift", "--preset", "elliptical-10k-20k", "--format", "json"], d.path()).unwrap());
    assert!((v["difference_rad"].as_f64().unwrap() - 36.2e-3).abs() < 0.4e-3);
    let cfg = write_config(d.path(), "[redshift]\naltitudes_km = [0.0]\n");
    let v = json(&run(&["redshift", "--config", &cfg, "--format", "json"], d.path()).unwrap());
    assert_eq!(v["points"][0]["phase_rad"].as_f64().unwrap(), 0.0);
}

#[test]
fn budget_variants() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "[budget]\nrows = [\"Shot noise\", \"Inconsistency of SPADs\"]\n");
    let v = json(&run(&["budget", "--config", &cfg, "--format", "json"], d.path()).unwrap());
    let rows = v["sources"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let q: f64 = rows.iter().map(|r| r["magnitude"].as_f64().unwrap().powi(2)).sum::<f64>().sqrt();
    let total = v["quadrature_total"].as_f64().unwrap();
    assert!((total - q).abs() < 1e-12 && (total - 16.2e-3).abs() < 0.2e-3, "{total}");
    let cfg = write_config(
        d.path(),
        "[budget]\nsources = [{ name = \"a\", magnitude = 0.0 }, { name = \"b\", magnitude = 0.0 }]\n",
    );
    let v = json(&run(&["budget", "--config", &cfg, "--format", "json"], d.path()).unwrap());
    assert_eq!(v["quadrature_total"].as_f64().unwrap(), 0.0);
    let csv = run(&["budget", "--format", "csv"], d.path()).unwrap();
    assert!(csv.starts_with("source,magnitude,unit\n"));
    assert_eq!(fs::read_to_string(d.path().join("budget.csv")).unwrap(), csv);
}

#[test]
fn linkbudget_variants() {
    let d = TempDir::new().unwrap();
    let v = json(&run(&["linkbudget", "--preset", "geo-link", "--format", "json"], d.path()).unwrap());
    assert_eq!(v["total_db"].as_f64().unwrap(), 67.5);
    assert!((v["geometric_recomputed_db"].as_f64().unwrap() - 59.0).abs() < 0.2);
    let h = v["acquisition_h"].as_f64().unwrap();
    assert!((0.22..=0.34).contains(&h), "{h}");
    let cfg = write_config(d.path(), "[linkbudget]\nsource_rate = 1e6\nitems = [{ name = \"none\", loss_db = 0.0 }]\n");
    let v = json(&run(&["linkbudget", "--config", &cfg, "--format", "json"], d.path()).unwrap());
    assert_eq!(v["detected_rate"].as_f64().unwrap(), 1e6);
    let cfg = write_config(d.path(), "[linkbudget]\nsource_rate = 1e6\nitems = []\n");
    assert_eq!(run(&["linkbudget", "--config", &cfg], d.path()).unwrap_err().exit_code(), 2);
}

#[test]
fn g2_from_timestamps() {
    let d = TempDir::new().unwrap();
    // Alternating detections spaced 1 µs apart never coincide.
    let a: String = (0..2000).map(|i| format!("{}\n", i as f64 * 2e-6)).collect();
    let b: String = (0..2000).map(|i| format!("{}\n", i as f64 * 2e-6 + 1e-6 + 0.3e-9 * (i % 7) as f64)).collect();
    fs::write(d.path().join("a.txt"), format!("# t\n{a}")).unwrap();
    fs::write(d.path().join("b.txt"), b).unwrap();
    let cfg = write_config(
        d.path(),
        &format!(
            "[g2]\nwindow = 4e-6\nbin = 0.5e-6\ntimestamps = [\"{}\", \"{}\"]\n",
            d.path().join("a.txt").display(),
            d.path().join("b.txt").display()
        ),
    );
    let v = json(&run(&["g2", "--config", &cfg, "--format", "json"], d.path()).unwrap());
    assert_eq!(v["g2_zero"].as_f64().unwrap(), 0.0);
    let g2csv = d.path().join("g2.csv").display().to_string();
    let f = json(&run(&["fit", &g2csv, "--format", "json"], &d.path().join("fit")).unwrap());
    assert_eq!(f["g2_zero"], v["g2_zero"]);
}

#[test]
fn binary_exit_codes_and_env_out_dir() {
    let exe = env!("CARGO_BIN_EXE_franson");
    let d = TempDir::new().unwrap();
    let ok = Command::new(exe)
        .args(["redshift", "--preset", "geo-50m"])
        .env("FRANSON_OUT_DIR", d.path().join("envout"))
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("207.6"));
    assert!(d.path().join("envout/resolved.toml").exists());

    let bad = Command::new(exe)
        .args(["redshift", "--preset", "nope", "--out"])
        .arg(d.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let cfg = write_config(d.path(), "[redshift]\naltitudes_km = [100.0]\nn_sigma = 0.5\n");
    let num = Command::new(exe)
        .args(["redshift", "--config", &cfg, "--out"])
        .arg(d.path())
        .output()
        .unwrap();
    assert_eq!(num.status.code(), Some(3));

    let usage = Command::new(exe).args(["frobnicate"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
