mod common;

use common::*;
use mediumband::dsp::{autocorr, rc_pulse, rc_spectrum, srrc_phi, srrc_pulse, tx_pulse};

#[test]
fn spectrum_integrates_to_one() {
    let cfg = pulse();
    let f2 = (1.0 + BETA) / (2.0 * TS);
    let f1 = (1.0 - BETA) / (2.0 * TS);
    let p = |f: f64| rc_spectrum(f, &cfg);
    let total = 2.0 * (simpson(&p, 0.0, f1, 1e-14) + simpson(&p, f1, f2, 1e-14));
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn parseval_gives_autocorr_peak() {
    let cfg = pulse();
    let f1 = (1.0 - BETA) / (2.0 * TS);
    let f2 = (1.0 + BETA) / (2.0 * TS);
    let p2 = |f: f64| rc_spectrum(f, &cfg).powi(2) / TS;
    let energy = 2.0 * (simpson(&p2, 0.0, f1, 1e-14) + simpson(&p2, f1, f2, 1e-14));
    assert!((energy - autocorr(0.0, &cfg)).abs() < 1e-9);
    assert!((energy - (1.0 - BETA / 4.0)).abs() < 1e-9);
}

#[test]
fn autocorr_matches_numerical_correlation() {
    let cfg = pulse();
    let mut taus: Vec<f64> = (0..192).map(|i| (-6.0 + 12.0 * i as f64 / 191.0) * TS).collect();
    for locus in [1.0 / (2.0 * BETA), 1.0 / BETA] {
        taus.extend([locus * TS, -locus * TS, (locus + 1e-9) * TS, (locus - 1e-7) * TS]);
    }
    assert_eq!(taus.len(), 200);
    let worst = taus
        .iter()
        .map(|&t| (autocorr(t, &cfg) - numeric_autocorr(t, &cfg)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "worst deviation {worst}");
}

#[test]
fn cascade_of_root_filters_is_raised_cosine() {
    let cfg = pulse();
    for i in 0..41 {
        let t = (-4.0 + 0.2 * i as f64) * TS;
        let conv = numeric_tx_rx(t, &cfg);
        assert!((conv - rc_pulse(t, &cfg)).abs() < 1e-4, "t = {t}: {conv} vs {}", rc_pulse(t, &cfg));
    }
}

#[test]
fn phi_is_inverse_transform_of_root_spectrum() {
    let cfg = pulse();
    let mut ts: Vec<f64> = (0..30).map(|i| (0.13 * i as f64) * TS).collect();
    ts.extend([0.0, TS / (4.0 * BETA), -TS / (4.0 * BETA)]);
    for t in ts {
        let want = numeric_phi(t, &cfg);
        let got = srrc_phi(t, &cfg);
        assert!(((got - want) * TS.sqrt()).abs() < 1e-8, "t = {t}: {got} vs {want}");
    }
    assert!((srrc_phi(0.0, &cfg) * TS.sqrt() - (1.0 + BETA * (4.0 / std::f64::consts::PI - 1.0))).abs() < 1e-12);
    assert_eq!(tx_pulse(0.3 * TS, &cfg), srrc_pulse(0.3 * TS, &cfg));
}

#[test]
fn raised_cosine_nyquist_zeros_and_truncation() {
    let cfg = pulse();
    assert_eq!(rc_pulse(0.0, &cfg), 1.0);
    for k in 1..=6 {
        assert!(rc_pulse(k as f64 * TS, &cfg).abs() < 1e-12);
    }
    assert_eq!(rc_pulse(6.01 * TS, &cfg), 0.0);
}
