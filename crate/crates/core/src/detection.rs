//! Frame-level MMSE and symbol-wise ML detection.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::MultipathChannel;
use crate::dsp::{rc_pulse, PulseConfig};
use crate::error::{Error, Result};
use crate::linalg::{dense_solve, HermitianBand};
use crate::scalar::Real;
use crate::timing::FadingFactor;
use crate::waveform::Constellation;

/// `L x L` banded Toeplitz channel matrix, `H(i, j) = h_{j-i}` for
/// `|j - i| <= K` and zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<T> {
    dim: usize,
    half_band: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> ChannelMatrix<T> {
    /// `coeffs` holds `h_{-K} .. h_K`.
    pub fn from_coeffs(dim: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: coeffs.len() + 1, got: coeffs.len() });
        }
        let half_band = coeffs.len() / 2;
        if dim <= half_band {
            return Err(Error::FrameTooShort { l: dim, k: half_band });
        }
        Ok(ChannelMatrix { dim, half_band, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_band(&self) -> usize {
        self.half_band
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `h_nu`, zero outside `-K..=K`.
    pub fn coeff(&self, nu: i64) -> Complex<T> {
        let k = self.half_band as i64;
        if nu.abs() > k {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(nu + k) as usize]
        }
    }

    /// Main-diagonal coefficient `h_0`.
    pub fn h0(&self) -> Complex<T> {
        self.coeff(0)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.coeff(j as i64 - i as i64)
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    fn band_cols(&self, i: usize) -> std::ops::Range<usize> {
        let k = self.half_band;
        i.saturating_sub(k)..(i + k + 1).min(self.dim)
    }

    /// `H s`.
    pub fn mul_vec(&self, s: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|i| self.band_cols(i).map(|j| self.get(i, j) * s[j]).sum())
            .collect()
    }

    /// `H^H x`.
    pub fn adjoint_mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|j| self.band_cols(j).map(|i| self.get(i, j).conj() * x[i]).sum())
            .collect()
    }

    /// `H H^H + lambda I` in banded Hermitian storage.
    pub fn gram_plus(&self, lambda: T) -> HermitianBand<T> {
        let k = self.half_band;
        let w = 2 * k;
        let mut a = HermitianBand::zeros(self.dim, w);
        for i in 0..self.dim {
            for m in i.saturating_sub(w)..=i {
                let cols = self.band_cols(i);
                let lo = cols.start.max(m.saturating_sub(k));
                let hi = cols.end.min(m + k + 1);
                let mut s: Complex<T> =
                    (lo..hi).map(|j| self.get(i, j) * self.get(m, j).conj()).sum();
                if i == m {
                    s = s + lambda;
                }
                a.set_lower(i, m, s);
            }
        }
        a
    }
}

/// Channel matrix at sampling offset `tau_hat`:
/// `h_nu = sum_n gamma_n p(tau_hat - tau_n - nu Ts)`, `nu = -K..=K`.
pub fn build_channel_matrix<T: Real>(
    channel: &MultipathChannel<T>,
    tau_hat: T,
    cfg: &PulseConfig<T>,
    l: usize,
) -> Result<ChannelMatrix<T>> {
    let k = cfg.span_k();
    if l <= k {
        return Err(Error::FrameTooShort { l, k });
    }
    let coeffs = (-(k as i64)..=k as i64)
        .map(|nu| {
            channel
                .gammas()
                .iter()
                .zip(channel.taus())
                .map(|(g, tau)| *g * rc_pulse(tau_hat - *tau - T::of_i64(nu) * cfg.ts(), cfg))
                .sum()
        })
        .collect();
    ChannelMatrix::from_coeffs(l, coeffs)
}

/// Detected symbols (constellation indices) and the pre-slicing estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult<T> {
    pub symbols: Vec<usize>,
    pub raw: Vec<Complex<T>>,
}

/// Linear solver behind the MMSE detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MmseSolver {
    /// Banded Cholesky on `H H^H + (sigma2/es) I`.
    #[default]
    Banded,
    /// Dense Gaussian elimination; reference path.
    Dense,
}

/// MMSE estimate `raw = H^H (H H^H + sigma2/es I)^{-1} r`, sliced to the
/// nearest constellation point after removing the `sqrt(es)` scale.
pub fn mmse_detect<T: Real>(
    h: &ChannelMatrix<T>,
    r: &[Complex<T>],
    sigma2: T,
    es: T,
    constellation: &Constellation<T>,
) -> Result<DetectionResult<T>> {
    mmse_detect_with(h, r, sigma2, es, constellation, MmseSolver::Banded)
}

pub fn mmse_detect_with<T: Real>(
    h: &ChannelMatrix<T>,
    r: &[Complex<T>],
    sigma2: T,
    es: T,
    constellation: &Constellation<T>,
    solver: MmseSolver,
) -> Result<DetectionResult<T>> {
    if r.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: r.len() });
    }
    let gram = h.gram_plus(sigma2 / es);
    let x = match solver {
        MmseSolver::Banded => gram.solve(r)?,
        MmseSolver::Dense => dense_solve(gram.to_dense(), r.to_vec())?,
    };
    let raw = h.adjoint_mul_vec(&x);
    let amp = es.sqrt();
    let symbols = raw.iter().map(|v| constellation.nearest(*v / amp)).collect();
    Ok(DetectionResult { symbols, raw })
}

/// Dense MMSE processing matrix `W = H^H (H H^H + sigma2/es I)^{-1}`.
pub fn mmse_weights<T: Real>(
    h: &ChannelMatrix<T>,
    sigma2: T,
    es: T,
) -> Result<Vec<Vec<Complex<T>>>> {
    let n = h.dim();
    let gram = h.gram_plus(sigma2 / es);
    let zero = Complex::new(T::zero(), T::zero());
    let mut w = vec![vec![zero; n]; n];
    for col in 0..n {
        let mut e = vec![zero; n];
        e[col] = Complex::new(T::one(), T::zero());
        let wc = h.adjoint_mul_vec(&gram.solve(&e)?);
        for row in 0..n {
            w[row][col] = wc[row];
        }
    }
    Ok(w)
}

/// `argmin_s |r_k - sqrt(es) g s|` over the constellation; ties go to the
/// lowest index.
pub fn ml_detect<T: Real>(
    r_k: Complex<T>,
    g: FadingFactor<T>,
    es: T,
    constellation: &Constellation<T>,
) -> usize {
    let scale = g * es.sqrt();
    let mut best = 0;
    let mut best_d = (r_k - scale * constellation.point(0)).norm_sqr();
    for i in 1..constellation.size() {
        let d = (r_k - scale * constellation.point(i)).norm_sqr();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Least-squares fading estimate from pilots:
/// `sum r_k conj(s_k) / (sqrt(es) sum |s_k|^2)`.
pub fn estimate_g_from_pilots<T: Real>(
    r_pilots: &[Complex<T>],
    pilots: &[Complex<T>],
    es: T,
) -> Result<FadingFactor<T>> {
    if pilots.is_empty() {
        return Err(Error::InvalidFrame("pilot-based estimation needs at least one pilot".into()));
    }
    if r_pilots.len() != pilots.len() {
        return Err(Error::DimensionMismatch { expected: pilots.len(), got: r_pilots.len() });
    }
    let corr: Complex<T> = r_pilots.iter().zip(pilots).map(|(r, s)| *r * s.conj()).sum();
    let energy: T = pilots.iter().map(|s| s.norm_sqr()).sum();
    Ok(corr / (es.sqrt() * energy))
}

/// Residual interference `y_k - sqrt(es) g s_k` of a noiseless sample.
pub fn residual_interference<T: Real>(
    y_k: Complex<T>,
    g: FadingFactor<T>,
    s_k: Complex<T>,
    es: T,
) -> Complex<T> {
    y_k - g * s_k * es.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timing::{desired_fading_factor, estimate_offsets, SearchParams, TimingMode};
    use crate::waveform::{synthesize_samples, Frame};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TS: f64 = 5e-7;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cfg(k: usize) -> PulseConfig<f64> {
        PulseConfig::new(TS, 0.22, k).unwrap()
    }

    #[test]
    fn flat_channel_gives_scaled_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = MultipathChannel::sample(10, 0.0, 0.0, &mut rng).unwrap();
        let sum: Complex<f64> = ch.gammas().iter().sum();
        let h = build_channel_matrix(&ch, 0.0, &cfg(6), 20).unwrap();
        assert!((h.h0() - sum).norm() < 1e-14);
        for nu in -6i64..=6 {
            if nu != 0 {
                assert!(h.coeff(nu).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn k1_has_three_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = MultipathChannel::sample(4, 0.5 * TS, 0.0, &mut rng).unwrap();
        let h = build_channel_matrix(&ch, 0.2 * TS, &cfg(1), 8).unwrap();
        assert_eq!(h.coeffs().len(), 3);
        let dense = h.to_dense();
        for i in 0..8 {
            for j in 0..8 {
                let d = j as i64 - i as i64;
                if d.abs() > 1 {
                    assert_eq!(dense[i][j], c(0.0, 0.0));
                } else {
                    assert_eq!(dense[i][j], h.coeffs()[(d + 1) as usize]);
                }
            }
        }
        assert!(build_channel_matrix(&ch, 0.0, &cfg(6), 6).is_err());
    }

    #[test]
    fn single_path_matrix_is_delta() {
        let tau = 0.37 * TS;
        let ch = MultipathChannel::new(vec![0.0, tau], vec![c(0.0, 0.0), c(0.6, -0.8)], 0.0).unwrap();
        let h = build_channel_matrix(&ch, tau, &cfg(6), 20).unwrap();
        assert!((h.h0() - c(0.6, -0.8)).norm() < 1e-15);
        for nu in [-6i64, -1, 1, 5] {
            assert!(h.coeff(nu).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_channel_passes_through() {
        let h = ChannelMatrix::from_coeffs(5, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let r = vec![c(0.9, 0.1), c(-1.2, 0.3), c(0.1, 0.0), c(-0.05, 2.0), c(0.7, -0.7)];
        let out = mmse_detect(&h, &r, 1e-14, 1.0, &Constellation::bpsk()).unwrap();
        for (a, b) in out.raw.iter().zip(&r) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(out.symbols, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn two_by_two_weights_match_hand_inverse() {
        // H = [[1, .5], [0, 1]], sigma2/es = 1:
        // H H^H + I = [[2.25, .5], [.5, 2]], det = 4.25,
        // inverse = [[2, -.5], [-.5, 2.25]] / 4.25
        // W = H^H inverse = [[2, -.5], [.5, 2]] / 4.25
        let h = ChannelMatrix::from_coeffs(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let w = mmse_weights(&h, 2.0, 2.0).unwrap();
        let expect = [[2.0 / 4.25, -0.5 / 4.25], [0.5 / 4.25, 2.0 / 4.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((w[i][j] - c(expect[i][j], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn noiseless_zero_forcing_recovers_frames() {
        let p = cfg(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bpsk = Constellation::bpsk();
        for _ in 0..20 {
            let ch = MultipathChannel::sample(10, 0.6 * TS, 0.0, &mut rng).unwrap();
            let frame = Frame::random(bpsk.clone(), 40, 0, 1.0, &mut rng).unwrap();
            let h = build_channel_matrix(&ch, 0.25 * TS, &p, 40).unwrap();
            let r = h.mul_vec(&frame.symbols());
            let out = mmse_detect(&h, &r, 1e-12, 1.0, &bpsk).unwrap();
            assert_eq!(out.symbols, frame.indices().collect::<Vec<_>>());
        }
    }

    #[test]
    fn banded_and_dense_solvers_agree() {
        let p = cfg(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = MultipathChannel::sample(6, 0.4 * TS, 0.0, &mut rng).unwrap();
        let h = build_channel_matrix(&ch, 0.1 * TS, &p, 30).unwrap();
        let r: Vec<_> = (0..30).map(|i| c((i as f64).cos(), (i as f64 * 0.7).sin())).collect();
        let q = Constellation::qpsk();
        let a = mmse_detect_with(&h, &r, 0.1, 1.0, &q, MmseSolver::Banded).unwrap();
        let b = mmse_detect_with(&h, &r, 0.1, 1.0, &q, MmseSolver::Dense).unwrap();
        for (x, y) in a.raw.iter().zip(&b.raw) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_noise_singular_channel_fails() {
        let h = ChannelMatrix::from_coeffs(4, vec![c(0.0, 0.0); 3]).unwrap();
        let r = vec![c(1.0, 0.0); 4];
        let err = mmse_detect(&h, &r, 0.0, 1.0, &Constellation::bpsk());
        assert!(matches!(err, Err(Error::SolverFailure)));
        assert!(mmse_detect(&h, &r, 0.1, 1.0, &Constellation::bpsk()).is_ok());
    }

    #[test]
    fn ml_detection_cases() {
        let bpsk = Constellation::bpsk();
        let q = Constellation::qpsk();
        let g = c(0.3, -0.9);
        for i in 0..4 {
            let r = g * q.point(i) * 2f64.sqrt();
            assert_eq!(ml_detect(r, g, 2.0, &q), i);
        }
        assert_eq!(ml_detect(c(5.0, 1.0), c(0.0, 0.0), 1.0, &bpsk), 0);
        assert_eq!(ml_detect(c(-5.0, 1.0), c(0.0, 0.0), 1.0, &q), 0);
    }

    #[test]
    fn ml_bpsk_is_matched_sign_rule() {
        let bpsk = Constellation::bpsk();
        let vals = [-2.0, -0.7, -0.1, 0.05, 0.4, 1.3];
        for &gr in &vals {
            for &gi in &vals {
                for &rr in &vals {
                    for &ri in &vals {
                        let g = c(gr, gi);
                        let r = c(rr, ri);
                        let expect = if (g.conj() * r).re >= 0.0 { 0 } else { 1 };
                        assert_eq!(ml_detect(r, g, 1.0, &bpsk), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn pilot_estimate_cases() {
        let ones = vec![c(1.0, 0.0); 6];
        let r = vec![c(0.4, -0.2); 6];
        assert!((estimate_g_from_pilots(&r, &ones, 1.0).unwrap() - c(0.4, -0.2)).norm() < 1e-15);

        let g = c(-0.3, 0.8);
        let pilots: Vec<_> = [1.0, -1.0, -1.0, 1.0, 1.0].iter().map(|&s| c(s, 0.0)).collect();
        let r: Vec<_> = pilots.iter().map(|s| g * s).collect();
        assert!((estimate_g_from_pilots(&r, &pilots, 1.0).unwrap() - g).norm() < 1e-15);
        assert!(estimate_g_from_pilots(&[], &[], 1.0).is_err());
    }

    #[test]
    fn residual_interference_vanishes_without_spread() {
        let p = cfg(6);
        let s = SearchParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = MultipathChannel::sample(10, 0.0, 0.0, &mut rng).unwrap();
        let frame = Frame::random(Constellation::bpsk(), 30, 0, 1.0, &mut rng).unwrap();
        let off = estimate_offsets(&ch, TimingMode::Split, &p, &s).unwrap();
        let g = desired_fading_factor(&ch, &off, &p);
        let y = synthesize_samples(&frame, &ch, &off, &p).unwrap();
        for (yk, sk) in y.iter().zip(frame.symbols()) {
            assert!(residual_interference(*yk, g, sk, 1.0).norm() < 1e-13);
        }
    }
}
