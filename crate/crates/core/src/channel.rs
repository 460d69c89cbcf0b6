//! Random multipath channel realizations and band classification.

use std::fmt;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One fading realization: propagation delays and complex gains of `N`
/// multipath components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRecord<T>", into = "ChannelRecord<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct MultipathChannel<T> {
    taus: Vec<T>,
    gammas: Vec<Complex<T>>,
    kappa: T,
}

/// Plain JSON shape of a channel: delays in seconds, gains as `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ChannelRecord<T> {
    pub taus: Vec<T>,
    pub gammas: Vec<[T; 2]>,
    #[serde(default = "zero_kappa")]
    pub kappa: T,
}

fn zero_kappa<T: Real>() -> T {
    T::zero()
}

impl<T: Real> TryFrom<ChannelRecord<T>> for MultipathChannel<T> {
    type Error = Error;

    fn try_from(rec: ChannelRecord<T>) -> Result<Self> {
        let gammas = rec.gammas.iter().map(|g| Complex::new(g[0], g[1])).collect();
        MultipathChannel::new(rec.taus, gammas, rec.kappa)
    }
}

impl<T: Real> From<MultipathChannel<T>> for ChannelRecord<T> {
    fn from(ch: MultipathChannel<T>) -> Self {
        ChannelRecord {
            gammas: ch.gammas.iter().map(|g| [g.re, g.im]).collect(),
            taus: ch.taus,
            kappa: ch.kappa,
        }
    }
}

impl<T: Real> MultipathChannel<T> {
    /// Delays must be finite, sorted ascending and start at zero.
    pub fn new(taus: Vec<T>, gammas: Vec<Complex<T>>, kappa: T) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::InvalidChannel("at least one path required".into()));
        }
        if taus.len() != gammas.len() {
            return Err(Error::InvalidChannel(format!(
                "{} delays but {} gains",
                taus.len(),
                gammas.len()
            )));
        }
        if taus.iter().any(|t| !t.is_finite())
            || gammas.iter().any(|g| !g.re.is_finite() || !g.im.is_finite())
        {
            return Err(Error::InvalidChannel("non-finite delay or gain".into()));
        }
        if taus[0] != T::zero() {
            return Err(Error::InvalidChannel("first delay must be zero".into()));
        }
        if taus.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidChannel("delays must be sorted ascending".into()));
        }
        if !(kappa >= T::zero()) {
            return Err(Error::InvalidChannel("decay constant must be >= 0".into()));
        }
        Ok(MultipathChannel { taus, gammas, kappa })
    }

    /// Draws delays spanning `[0, tm]` and Rayleigh gains with an
    /// exponential power profile.
    pub fn sample<R: Rng + ?Sized>(n_paths: usize, tm: T, kappa: T, rng: &mut R) -> Result<Self> {
        if n_paths == 0 {
            return Err(Error::InvalidChannel("at least one path required".into()));
        }
        let taus = sample_delays(n_paths, tm, rng);
        let gammas = sample_gains(n_paths, kappa, rng);
        MultipathChannel::new(taus, gammas, kappa)
    }

    pub fn taus(&self) -> &[T] {
        &self.taus
    }

    pub fn gammas(&self) -> &[Complex<T>] {
        &self.gammas
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn n_paths(&self) -> usize {
        self.taus.len()
    }

    pub fn delay_spread(&self) -> T {
        delay_spread(&self.taus)
    }

    /// `sum |gamma_n|^2` of this realization.
    pub fn total_power(&self) -> T {
        self.gammas.iter().map(|g| g.norm_sqr()).sum()
    }
}

impl MultipathChannel<f64> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Propagation delays: `n_paths` uniform draws on `[0, tm]`, shifted to start
/// at zero, stretched to end at `tm` and sorted.
///
/// A single path or `tm = 0` yields all zeros.
pub fn sample_delays<T: Real, R: Rng + ?Sized>(n_paths: usize, tm: T, rng: &mut R) -> Vec<T> {
    let mut taus: Vec<T> = (0..n_paths).map(|_| tm * T::lit(rng.random::<f64>())).collect();
    if n_paths < 2 || tm == T::zero() {
        return vec![T::zero(); n_paths];
    }
    let min = taus.iter().copied().fold(T::infinity(), T::min);
    for t in taus.iter_mut() {
        *t = *t - min;
    }
    let max = taus.iter().copied().fold(T::zero(), T::max);
    if max == T::zero() {
        return vec![T::zero(); n_paths];
    }
    let scale = tm / max;
    for t in taus.iter_mut() {
        *t = scale * *t;
    }
    taus.sort_by(|a, b| a.partial_cmp(b).expect("finite delays"));
    // (tm / max) * max may round one ulp away from tm
    taus[n_paths - 1] = tm;
    taus
}

/// Amplitude profile `alpha_n ~ exp(-kappa n)`, `n = 1..N`, normalized to
/// unit total power.
pub fn amplitude_profile<T: Real>(n_paths: usize, kappa: T) -> Vec<T> {
    let raw: Vec<T> = (1..=n_paths).map(|n| (-kappa * T::of_usize(n)).exp()).collect();
    let norm = raw.iter().map(|a| *a * *a).sum::<T>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}

/// Circularly-symmetric complex Gaussian gains with `E|gamma_n|^2 = alpha_n^2`.
pub fn sample_gains<T: Real, R: Rng + ?Sized>(
    n_paths: usize,
    kappa: T,
    rng: &mut R,
) -> Vec<Complex<T>> {
    amplitude_profile(n_paths, kappa)
        .into_iter()
        .map(|a| {
            let sd = (a * a / T::lit(2.0)).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(sd * T::lit(re), sd * T::lit(im))
        })
        .collect()
}

/// `max_n |tau_n - tau_0|`.
pub fn delay_spread<T: Real>(taus: &[T]) -> T {
    let first = taus[0];
    taus.iter().map(|t| (*t - first).abs()).fold(T::zero(), T::max)
}

/// Percentage delay spread, `100 tm / ts`.
pub fn pds<T: Real>(tm: T, ts: T) -> T {
    tm / ts * T::lit(100.0)
}

/// Operating regime given delay spread and symbol period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandClass {
    Narrowband,
    Mediumband,
    Broadband,
}

impl fmt::Display for BandClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BandClass::Narrowband => "narrowband",
            BandClass::Mediumband => "mediumband",
            BandClass::Broadband => "broadband",
        };
        f.write_str(s)
    }
}

/// Narrowband for `tm <= 0.1 ts`, broadband for `tm >= ts`, mediumband in
/// between.
pub fn classify_band<T: Real>(tm: T, ts: T) -> BandClass {
    if tm <= T::lit(0.1) * ts {
        BandClass::Narrowband
    } else if tm < ts {
        BandClass::Mediumband
    } else {
        BandClass::Broadband
    }
}
