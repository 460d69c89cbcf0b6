#![allow(dead_code, clippy::too_many_arguments)]

use mediumband::dsp::{rc_pulse_untruncated, rc_spectrum, srrc_pulse};
use mediumband::PulseConfig64;

pub const TS: f64 = 5e-7;
pub const BETA: f64 = 0.22;

pub fn pulse() -> PulseConfig64 {
    PulseConfig64::new(TS, BETA, 6).unwrap()
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Trapezoid rule with `n` intervals.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

/// `(1/Ts) int p(u) p(u + tau) du` with the untruncated raised cosine.
pub fn numeric_autocorr(tau: f64, cfg: &PulseConfig64) -> f64 {
    let w = 150.0 * TS;
    let n = 6_000;
    trapezoid(|u| rc_pulse_untruncated(u, cfg) * rc_pulse_untruncated(u + tau, cfg), -w, w, n) / TS
}

/// `int p_T(u) p_R(t - u) du` with untruncated square-root pulses.
pub fn numeric_tx_rx(t: f64, cfg: &PulseConfig64) -> f64 {
    let w = 300.0 * TS;
    let n = 12_000;
    trapezoid(|u| srrc_pulse(u, cfg) * srrc_pulse(t - u, cfg) / TS, -w, w, n)
}

/// `int sqrt(P(f)) exp(j 2 pi f t) df`, the inverse transform of the root spectrum.
pub fn numeric_phi(t: f64, cfg: &PulseConfig64) -> f64 {
    let f1 = (1.0 - BETA) / (2.0 * TS);
    let f2 = (1.0 + BETA) / (2.0 * TS);
    let g = |f: f64| rc_spectrum(f, cfg).sqrt() * (2.0 * std::f64::consts::PI * f * t).cos();
    let scale = TS.sqrt() / TS;
    2.0 * (simpson(&g, 0.0, f1, 1e-13 * scale) + simpson(&g, f1, f2, 1e-13 * scale))
}

/// Gaussian tail `Q(x)`.
pub fn q_func(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}
