//! Frames, constellations, noiseless receive-sample synthesis and AWGN.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::MultipathChannel;
use crate::dsp::{rc_pulse, PulseConfig};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::timing::{TimingMode, TimingOffsets};

/// Modulation alphabets shipped with the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qpsk,
}

/// Unit-energy signal constellation with Gray bit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    points: Vec<Complex<T>>,
    labels: Vec<u32>,
    bits_per_symbol: u32,
}

impl<T: Real> Constellation<T> {
    /// Normalizes `points` to unit mean energy. `labels[i]` is the bit
    /// pattern carried by `points[i]`.
    pub fn new(points: Vec<Complex<T>>, labels: Vec<u32>) -> Result<Self> {
        let m = points.len();
        if m < 2 || !m.is_power_of_two() || labels.len() != m {
            return Err(Error::InvalidFrame(format!("constellation size {m} is not a power of two >= 2")));
        }
        let bits_per_symbol = m.trailing_zeros();
        let mut seen = vec![false; m];
        for &l in &labels {
            if (l as usize) >= m || seen[l as usize] {
                return Err(Error::InvalidFrame("labels must be a permutation of 0..M".into()));
            }
            seen[l as usize] = true;
        }
        let energy: T = points.iter().map(|p| p.norm_sqr()).sum::<T>() / T::of_usize(m);
        if !(energy > T::zero()) {
            return Err(Error::InvalidFrame("constellation has zero energy".into()));
        }
        let s = energy.sqrt();
        let points = points.into_iter().map(|p| p / s).collect();
        Ok(Constellation { points, labels, bits_per_symbol })
    }

    /// `{+1, -1}` carrying bits `{0, 1}`.
    pub fn bpsk() -> Self {
        Constellation {
            points: vec![Complex::new(T::one(), T::zero()), Complex::new(-T::one(), T::zero())],
            labels: vec![0, 1],
            bits_per_symbol: 1,
        }
    }

    /// Gray-mapped 4-QAM: bit 0 sets the sign of I, bit 1 the sign of Q.
    pub fn qpsk() -> Self {
        let a = T::FRAC_1_SQRT_2();
        Constellation {
            points: vec![
                Complex::new(a, a),
                Complex::new(-a, a),
                Complex::new(a, -a),
                Complex::new(-a, -a),
            ],
            labels: vec![0, 1, 2, 3],
            bits_per_symbol: 2,
        }
    }

    pub fn from_modulation(m: Modulation) -> Self {
        match m {
            Modulation::Bpsk => Self::bpsk(),
            Modulation::Qpsk => Self::qpsk(),
        }
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> Complex<T> {
        self.points[idx]
    }

    pub fn label(&self, idx: usize) -> u32 {
        self.labels[idx]
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn is_real(&self) -> bool {
        self.points.iter().all(|p| p.im == T::zero())
    }

    /// Index of the point closest to `z`; ties go to the lower index.
    pub fn nearest(&self, z: Complex<T>) -> usize {
        let mut best = 0;
        let mut best_d = (z - self.points[0]).norm_sqr();
        for (i, p) in self.points.iter().enumerate().skip(1) {
            let d = (z - *p).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Number of differing bits between the labels of two points.
    pub fn bit_errors(&self, a: usize, b: usize) -> u32 {
        (self.labels[a] ^ self.labels[b]).count_ones()
    }

    pub fn random_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.points.len())
    }
}

/// One frame: pilots first, then data, as constellation indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    constellation: Constellation<T>,
    pilots: Vec<usize>,
    data: Vec<usize>,
    es: T,
}

impl<T: Real> Frame<T> {
    pub fn new(
        constellation: Constellation<T>,
        pilots: Vec<usize>,
        data: Vec<usize>,
        es: T,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidFrame("frame carries no data symbols".into()));
        }
        if !(es > T::zero()) {
            return Err(Error::InvalidFrame("symbol energy must be > 0".into()));
        }
        let m = constellation.size();
        if pilots.iter().chain(&data).any(|&i| i >= m) {
            return Err(Error::InvalidFrame("symbol index outside constellation".into()));
        }
        Ok(Frame { constellation, pilots, data, es })
    }

    /// Uniformly random pilots and data.
    pub fn random<R: Rng + ?Sized>(
        constellation: Constellation<T>,
        len: usize,
        pilot_len: usize,
        es: T,
        rng: &mut R,
    ) -> Result<Self> {
        if pilot_len >= len {
            return Err(Error::InvalidFrame(format!(
                "pilot length {pilot_len} must be below frame length {len}"
            )));
        }
        let pilots = (0..pilot_len).map(|_| constellation.random_index(rng)).collect();
        let data = (0..len - pilot_len).map(|_| constellation.random_index(rng)).collect();
        Frame::new(constellation, pilots, data, es)
    }

    pub fn constellation(&self) -> &Constellation<T> {
        &self.constellation
    }

    pub fn pilots(&self) -> &[usize] {
        &self.pilots
    }

    pub fn data(&self) -> &[usize] {
        &self.data
    }

    pub fn es(&self) -> T {
        self.es
    }

    pub fn len(&self) -> usize {
        self.pilots.len() + self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pilot_len(&self) -> usize {
        self.pilots.len()
    }

    /// All `L` symbol indices, pilots first.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.pilots.iter().chain(&self.data).copied()
    }

    /// Unit-energy symbols `I_k`, pilots first.
    pub fn symbols(&self) -> Vec<Complex<T>> {
        self.indices().map(|i| self.constellation.point(i)).collect()
    }

    pub fn pilot_symbols(&self) -> Vec<Complex<T>> {
        self.pilots.iter().map(|&i| self.constellation.point(i)).collect()
    }
}

/// Receive samples of one frame together with the noiseless part.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame<T> {
    pub samples: Vec<Complex<T>>,
    pub noiseless: Vec<Complex<T>>,
    pub sigma2: T,
}

/// `sum_i s_i p(offset + (k - i) Ts - tau)` for every `k`, with `s_i = 0`
/// outside the frame.
fn path_response<T: Real>(
    symbols: &[T],
    offset: T,
    tau: T,
    cfg: &PulseConfig<T>,
    out: &mut [T],
) {
    let l = symbols.len() as i64;
    let ts = cfg.ts();
    let k = cfg.span_k() as i64;
    // p(offset + m Ts - tau) vanishes unless |offset - tau + m Ts| <= K Ts
    let centre = ((tau - offset) / ts).round().to_i64().unwrap_or(0);
    let lo = (centre - k - 1).max(-(l - 1));
    let hi = (centre + k + 1).min(l - 1);
    if lo > hi {
        out.iter_mut().for_each(|v| *v = T::zero());
        return;
    }
    let taps: Vec<T> = (lo..=hi).map(|m| rc_pulse(offset + T::of_i64(m) * ts - tau, cfg)).collect();
    for (kk, o) in out.iter_mut().enumerate() {
        let kk = kk as i64;
        let mut acc = T::zero();
        for (j, tap) in taps.iter().enumerate() {
            let i = kk - (lo + j as i64);
            if (0..l).contains(&i) {
                acc = acc + symbols[i as usize] * *tap;
            }
        }
        *o = acc;
    }
}

/// Noiseless receive samples `y(k)`, `k = 0..L`.
///
/// Joint mode samples the complex multipath sum at `tau + k Ts`. Split mode
/// samples the in-phase branch (real gains) at `tau_i + k Ts` and the
/// quadrature branch (imaginary gains) at `tau_q + k Ts`, which is only
/// meaningful for real constellations.
pub fn synthesize_samples<T: Real>(
    frame: &Frame<T>,
    channel: &MultipathChannel<T>,
    offsets: &TimingOffsets<T>,
    cfg: &PulseConfig<T>,
) -> Result<Vec<Complex<T>>> {
    let symbols = frame.symbols();
    let l = symbols.len();
    let amp = frame.es().sqrt();
    let mut y = vec![Complex::new(T::zero(), T::zero()); l];
    let re: Vec<T> = symbols.iter().map(|s| s.re).collect();
    let mut buf = vec![T::zero(); l];

    match offsets.mode {
        TimingMode::Split => {
            if !frame.constellation().is_real() {
                return Err(Error::SplitNeedsRealConstellation);
            }
            let mut buf_q = vec![T::zero(); l];
            for (g, tau) in channel.gammas().iter().zip(channel.taus()) {
                path_response(&re, offsets.tau_i, *tau, cfg, &mut buf);
                path_response(&re, offsets.tau_q, *tau, cfg, &mut buf_q);
                for k in 0..l {
                    y[k].re = y[k].re + g.re * buf[k];
                    y[k].im = y[k].im + g.im * buf_q[k];
                }
            }
        }
        TimingMode::Joint => {
            let im: Vec<T> = symbols.iter().map(|s| s.im).collect();
            let complex_symbols = im.iter().any(|v| *v != T::zero());
            let mut buf_im = vec![T::zero(); l];
            for (g, tau) in channel.gammas().iter().zip(channel.taus()) {
                path_response(&re, offsets.tau_i, *tau, cfg, &mut buf);
                if complex_symbols {
                    path_response(&im, offsets.tau_i, *tau, cfg, &mut buf_im);
                }
                for k in 0..l {
                    y[k] = y[k] + *g * Complex::new(buf[k], buf_im[k]);
                }
            }
        }
    }
    for v in y.iter_mut() {
        *v = *v * amp;
    }
    Ok(y)
}

/// Noiseless complex baseband `y(t)` on an oversampled grid starting at
/// `t0`, `oversample` points per symbol period. Intended for plotting.
pub fn synthesize_waveform<T: Real>(
    frame: &Frame<T>,
    channel: &MultipathChannel<T>,
    cfg: &PulseConfig<T>,
    t0: T,
    n_points: usize,
    oversample: usize,
) -> Vec<(T, Complex<T>)> {
    let symbols = frame.symbols();
    let amp = frame.es().sqrt();
    let dt = cfg.ts() / T::of_usize(oversample.max(1));
    (0..n_points)
        .map(|j| {
            let t = t0 + T::of_usize(j) * dt;
            let mut acc = Complex::new(T::zero(), T::zero());
            for (g, tau) in channel.gammas().iter().zip(channel.taus()) {
                let mut s = Complex::new(T::zero(), T::zero());
                for (i, sym) in symbols.iter().enumerate() {
                    s = s + *sym * rc_pulse(t - T::of_usize(i) * cfg.ts() - *tau, cfg);
                }
                acc = acc + *g * s;
            }
            (t, acc * amp)
        })
        .collect()
}

/// Noise variance achieving a per-bit SNR: `es * gamma_power / (snr log2 M)`.
pub fn sigma2_for_snr<T: Real>(snr: T, es: T, gamma_power: T, m: usize) -> T {
    let bits = T::of_usize(m).log2();
    es * gamma_power / (snr * bits)
}

/// Adds iid `CN(0, sigma2)` noise.
pub fn add_noise<T: Real, R: Rng + ?Sized>(
    y: &[Complex<T>],
    sigma2: T,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let sd = (sigma2 / T::lit(2.0)).sqrt();
    y.iter()
        .map(|v| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            *v + Complex::new(sd * T::lit(a), sd * T::lit(b))
        })
        .collect()
}

/// Synthesizes a frame and adds noise at variance `sigma2`.
pub fn receive<T: Real, R: Rng + ?Sized>(
    frame: &Frame<T>,
    channel: &MultipathChannel<T>,
    offsets: &TimingOffsets<T>,
    cfg: &PulseConfig<T>,
    sigma2: T,
    rng: &mut R,
) -> Result<ReceivedFrame<T>> {
    let noiseless = synthesize_samples(frame, channel, offsets, cfg)?;
    let samples = add_noise(&noiseless, sigma2, rng);
    Ok(ReceivedFrame { samples, noiseless, sigma2 })
}
