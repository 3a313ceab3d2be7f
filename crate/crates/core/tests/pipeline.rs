use std::f64::consts::{FRAC_PI_2, PI};

use franson_core::detection::{detrend_linear, extract_phase, simulate_campaign, CampaignConfig};
use franson_core::formats::{read_counts, read_phase, write_counts, write_phase};
use franson_core::series::TimeSeries;
use franson_core::state::{
    detection_probabilities, effective_visibility, prepare_superposition, receive_umi, sigma_x_probabilities,
    transmit_umi, Polarization, UmiParams, VisibilityFactors,
};

#[test]
fn photon_through_both_interferometers() {
    let overlap = VisibilityFactors::default().mode_overlap;
    for i in 0..12 {
        let phi = i as f64 * PI / 6.0;
        let s = prepare_superposition(893.2e-9, 0.1).unwrap();
        let tx = UmiParams::new(1.2, 0.0, Polarization::V, 0.9).unwrap();
        let rx = UmiParams::new(1.2 + 8.25e-6, 0.0, Polarization::H, 0.9).unwrap();
        let sent = transmit_umi(&s, &tx).unwrap();
        let (got, report) = receive_umi(&sent, &rx, phi).unwrap();
        assert!(!report.mismatch_flagged);
        let (p1, p2) = sigma_x_probabilities(&got, overlap);
        // Same fringe as the closed form, up to a sign convention on the phase.
        let (q1, q2) = detection_probabilities(phi, overlap).unwrap();
        let (r1, _) = detection_probabilities(-phi, overlap).unwrap();
        assert!((p1 + p2 - 1.0).abs() < 1e-12 && (q1 + q2 - 1.0).abs() < 1e-12);
        assert!((p1 - q1).abs() < 1e-12 || (p1 - r1).abs() < 1e-12, "{phi}: {p1} vs {q1}");
    }
}

#[test]
fn link_visibility_feeds_extraction() {
    let v = effective_visibility(&VisibilityFactors::default()).unwrap();
    assert!((v - 0.863).abs() < 0.005, "{v}");
    let (p1, p2) = detection_probabilities(1.0, v).unwrap();
    let est = extract_phase(p1 * 1e7, p2 * 1e7, v).unwrap();
    assert!((est.phase - 1.0).abs() < 1e-9);
}

#[test]
fn campaign_survives_csv_round_trip() {
    let cfg = CampaignConfig {
        seed: 5,
        ..CampaignConfig::urban_link().unwrap()
    };
    let r = simulate_campaign(&cfg).unwrap();

    let mut buf = Vec::new();
    write_counts(&mut buf, &r.records).unwrap();
    let back = read_counts(buf.as_slice()).unwrap();
    assert_eq!(back, r.records);

    let phases: Vec<f64> = back
        .iter()
        .map(|c| extract_phase(c.c1 as f64, c.c2 as f64, cfg.visibility).map(|e| e.phase).unwrap_or(FRAC_PI_2))
        .collect();
    let t: Vec<f64> = back.iter().map(|c| c.t).collect();
    let rebuilt = TimeSeries::new(t, phases).unwrap();
    let mut buf = Vec::new();
    write_phase(&mut buf, &r.phases).unwrap();
    let stored = read_phase(buf.as_slice()).unwrap();
    assert_eq!(stored.values(), r.phases.values());

    let d = detrend_linear(&stored).unwrap();
    assert_eq!(d.slope, r.summary.slope);
    if r.summary.clamped_samples == 0 {
        assert_eq!(rebuilt.values(), r.phases.values());
    }
}
