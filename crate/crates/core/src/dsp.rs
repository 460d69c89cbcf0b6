//! Raised-cosine pulse math.
//!
//! All functions are total: the removable singularities of the closed forms
//! are routed to their limiting values whenever the argument falls within
//! [`SINGULAR_TOL`] symbol periods of a singular locus.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Distance (in symbol periods) under which an argument is treated as
/// sitting exactly on a removable singularity.
pub const SINGULAR_TOL: f64 = 1e-8;

/// Pulse-shaping parameters: symbol period, roll-off and half-span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig<T> {
    ts: T,
    beta: T,
    span_k: usize,
}

impl<T: Real> PulseConfig<T> {
    /// `ts` in seconds, `beta` in (0, 1], filter spans `2 * span_k` symbols.
    pub fn new(ts: T, beta: T, span_k: usize) -> Result<Self> {
        if !(ts > T::zero()) || !ts.is_finite() {
            return Err(Error::InvalidPulse(format!("symbol period must be > 0, got {ts}")));
        }
        if !(beta > T::zero() && beta <= T::one()) {
            return Err(Error::InvalidPulse(format!("roll-off must lie in (0, 1], got {beta}")));
        }
        if span_k == 0 {
            return Err(Error::InvalidPulse("half-span K must be at least 1".into()));
        }
        Ok(PulseConfig { ts, beta, span_k })
    }

    #[inline]
    pub fn ts(&self) -> T {
        self.ts
    }

    #[inline]
    pub fn beta(&self) -> T {
        self.beta
    }

    #[inline]
    pub fn span_k(&self) -> usize {
        self.span_k
    }

    /// Peak of the data-signal autocorrelation, `1 - beta/4`.
    #[inline]
    pub fn autocorr_peak(&self) -> T {
        T::one() - self.beta / T::lit(4.0)
    }

    /// Upper bound on `|R'(tau)|`.
    ///
    /// `R` has spectrum `P(f)^2 / Ts`, band-limited to `(1 + beta) / (2 Ts)`,
    /// and `|R| <= R(0)`, so Bernstein's inequality gives
    /// `|R'| <= pi (1 + beta) R(0) / Ts`.
    pub fn autocorr_slope_bound(&self) -> T {
        T::PI() * (T::one() + self.beta) * self.autocorr_peak() / self.ts
    }
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
#[inline]
pub fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let px = T::PI() * x;
        px.sin() / px
    }
}

#[inline]
fn near<T: Real>(x: T, locus: T) -> bool {
    (x.abs() - locus).abs() < T::lit(SINGULAR_TOL)
}

/// Raised-cosine pulse without truncation.
pub fn rc_pulse_untruncated<T: Real>(t: T, cfg: &PulseConfig<T>) -> T {
    let x = t / cfg.ts;
    let b = cfg.beta;
    let two = T::lit(2.0);
    let locus = T::one() / (two * b);
    if near(x, locus) {
        return T::FRAC_PI_4() * sinc(locus);
    }
    let u = two * b * x;
    sinc(x) * (T::PI() * b * x).cos() / (T::one() - u * u)
}

/// Raised-cosine pulse `p(t)`, zero outside `|t| <= K Ts`.
pub fn rc_pulse<T: Real>(t: T, cfg: &PulseConfig<T>) -> T {
    if t.abs() > T::of_usize(cfg.span_k) * cfg.ts {
        return T::zero();
    }
    rc_pulse_untruncated(t, cfg)
}

/// Raised-cosine spectrum `P(f)`, in seconds. Integrates to one.
pub fn rc_spectrum<T: Real>(f: T, cfg: &PulseConfig<T>) -> T {
    let two = T::lit(2.0);
    let af = f.abs();
    let b = cfg.beta;
    let ts = cfg.ts;
    let f1 = (T::one() - b) / (two * ts);
    let f2 = (T::one() + b) / (two * ts);
    if af <= f1 {
        ts
    } else if af <= f2 {
        ts / two * (T::one() + (T::PI() * ts / b * (af - f1)).cos())
    } else {
        T::zero()
    }
}

/// Unit-peak square-root raised-cosine shape `h(t)`, dimensionless.
///
/// `h(0) = 1 + beta (4/pi - 1)` and the `t = +-Ts/(4 beta)` branch use the
/// closed forms. The continuous-time filters follow from it as
/// `p_T = h` and `p_R = h / Ts`, so that `p_T * p_R = p` (see [`srrc_phi`]).
pub fn srrc_pulse<T: Real>(t: T, cfg: &PulseConfig<T>) -> T {
    let x = t / cfg.ts;
    let b = cfg.beta;
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let pi = T::PI();
    if x.abs() < T::lit(SINGULAR_TOL) {
        return one + b * (four / pi - one);
    }
    let locus = one / (four * b);
    if near(x, locus) {
        let a = pi / (four * b);
        return b / two.sqrt() * ((one + two / pi) * a.sin() + (one - two / pi) * a.cos());
    }
    let u = four * b * x;
    let num = (pi * x * (one - b)).sin() + u * (pi * x * (one + b)).cos();
    num / (pi * x * (one - u * u))
}

/// `Phi(t)`, the inverse Fourier transform of `sqrt(P(f))`.
///
/// Equals `h(t) / sqrt(Ts)`, units `1/sqrt(s)`.
pub fn srrc_phi<T: Real>(t: T, cfg: &PulseConfig<T>) -> T {
    srrc_pulse(t, cfg) / cfg.ts.sqrt()
}

/// Transmit filter `p_T(t) = sqrt(Ts) Phi(t)`.
pub fn tx_pulse<T: Real>(t: T, cfg: &PulseConfig<T>) -> T {
    srrc_pulse(t, cfg)
}

/// Receive filter `p_R(t) = Phi(t) / sqrt(Ts)`, units 1/s.
pub fn rx_pulse<T: Real>(t: T, cfg: &PulseConfig<T>) -> T {
    srrc_pulse(t, cfg) / cfg.ts
}

/// Autocorrelation `R(tau)` of the unit-energy data signal. Never truncated.
pub fn autocorr<T: Real>(tau: T, cfg: &PulseConfig<T>) -> T {
    let x = tau / cfg.ts;
    let b = cfg.beta;
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let pi = T::PI();

    let first_locus = one / (two * b);
    let first = if near(x, first_locus) {
        T::FRAC_PI_4() * sinc(first_locus)
    } else {
        let u = two * b * x;
        sinc(x) * (pi * b * x).cos() / (one - u * u)
    };

    // sinc(u) / (1 - u^2) = sin(pi u) / (pi u (1 - u)(1 + u)); with
    // sin(pi u) = sin(pi (1 - u)) ~ pi (1 - u) the ratio tends to 1/2 at
    // u = +-1, leaving (beta/4) * (1/2) * cos(pi / beta).
    let second_locus = one / b;
    let second = if near(x, second_locus) {
        b / T::lit(8.0) * (pi / b).cos()
    } else {
        let u = b * x;
        b / four * sinc(u) * (pi * x).cos() / (one - u * u)
    };

    first - second
}

/// Evaluates `rc_pulse` over a batch of time instants.
pub fn rc_pulse_batch<T: Real>(ts: &[T], cfg: &PulseConfig<T>) -> Vec<T> {
    ts.iter().map(|&t| rc_pulse(t, cfg)).collect()
}

/// Evaluates `autocorr` over a batch of lags.
pub fn autocorr_batch<T: Real>(taus: &[T], cfg: &PulseConfig<T>) -> Vec<T> {
    taus.iter().map(|&t| autocorr(t, cfg)).collect()
}

/// Evaluates `srrc_pulse` over a batch of time instants.
pub fn srrc_pulse_batch<T: Real>(ts: &[T], cfg: &PulseConfig<T>) -> Vec<T> {
    ts.iter().map(|&t| srrc_pulse(t, cfg)).collect()
}
