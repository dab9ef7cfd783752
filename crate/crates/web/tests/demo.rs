use std::f64::consts::PI;

use displacemon_web::demo::{flux_sweep, protocol_wigner, readout_map};

#[test]
fn sweep_matches_reference_device() {
    let s = flux_sweep(12.0, 0.5, 381).unwrap();
    let mid = s.flux.iter().position(|f| f.abs() < 1e-12).unwrap();
    assert!(s.lambda_mhz[mid].abs() < 1e-9);
    assert!((s.omega_q_ghz[mid] - 4.38).abs() < 0.05);
    assert!(s.omega_q_ghz.iter().all(|w| w.is_finite()));
}

#[test]
fn ground_state_protocol_is_nonclassical() {
    let w = protocol_wigner(1.9, 0.0, 0).unwrap();
    assert!(w.min < -1e-3);
    assert!((w.probability - 0.25).abs() < 0.01);
    assert_eq!(w.values.len(), w.x.len() * w.p.len());
}

#[test]
fn map_features_sit_on_the_kick_loci() {
    let m = readout_map(1.9, 0.0, 0.0, 16, 16).unwrap();
    assert!(m.values.iter().all(|v| (0.0..=1.0).contains(v)));
    let near = |t: f64, r: f64| m.features.iter().any(|f| (f.theta - t).abs() < 0.2 && (f.ratio - r).abs() < 0.13);
    assert!(near(0.0, 1.0) && near(0.5 * PI, 1.0));
}

#[test]
fn out_of_range_inputs_are_rejected() {
    assert!(flux_sweep(0.0, 0.5, 10).is_err());
    assert!(protocol_wigner(5.0, 0.0, 0).is_err());
    assert!(readout_map(1.9, 0.0, 0.0, 2, 16).is_err());
}
