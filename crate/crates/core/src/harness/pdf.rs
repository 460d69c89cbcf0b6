use num_complex::Complex;
use rayon::prelude::*;

use super::config::SimConfig;
use super::rng::{substream, StreamDomain};
use super::sweep::draw_channel;
use crate::channel::MultipathChannel;
use crate::error::{Error, Result};
use crate::timing::{desired_fading_factor, estimate_offsets};

/// Binning of a fading-factor study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfOptions {
    pub bins: usize,
    /// Upper edge of the magnitude histogram; components use `[-max, max]`.
    pub max_magnitude: f64,
    /// Deep-fade threshold for `P(|g| < threshold)`.
    pub threshold: f64,
}

impl Default for PdfOptions {
    fn default() -> Self {
        PdfOptions { bins: 60, max_magnitude: 3.0, threshold: 0.1 }
    }
}

/// Fixed-width histogram normalized to a density over all samples,
/// including those falling outside `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        let mut total = 0;
        for x in samples {
            total += 1;
            if x >= lo && x < hi {
                let i = (((x - lo) / width) as usize).min(bins - 1);
                counts[i] += 1;
            }
        }
        Histogram { lo, hi, counts, total }
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    /// `(left, right, density)` per bin.
    pub fn bins(&self) -> Vec<(f64, f64, f64)> {
        let w = self.width();
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let left = self.lo + i as f64 * w;
                let d = if self.total == 0 { 0.0 } else { c as f64 / (self.total as f64 * w) };
                (left, left + w, d)
            })
            .collect()
    }
}

/// Distribution of the desired fading factor over channel realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingPdf {
    pub magnitude: Histogram,
    pub real: Histogram,
    pub imag: Histogram,
    pub threshold: f64,
    /// Fraction of realizations with `|g| < threshold`.
    pub p_below: f64,
    pub realizations: u64,
}

/// Channel realization `index` of a fading study with this configuration.
pub fn random_channel(cfg: &SimConfig, index: u64) -> Result<MultipathChannel<f64>> {
    let mut rng = substream(cfg.seed, StreamDomain::FadingPdf, 0, index, 0);
    draw_channel(cfg, &mut rng)
}

/// Desired fading factors of `n` independent channel realizations, each
/// with offsets searched per `cfg.timing_mode`.
pub fn fading_samples(cfg: &SimConfig, n: u64) -> Result<Vec<Complex<f64>>> {
    cfg.validate()?;
    let pulse = cfg.pulse()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let channel = random_channel(cfg, i)?;
                let offsets = estimate_offsets(&channel, cfg.timing_mode, &pulse, &cfg.search)?;
                Ok(desired_fading_factor(&channel, &offsets, &pulse))
            })
            .collect()
    })
}

/// Histograms of `|g|`, `Re g` and `Im g` plus the deep-fade probability.
pub fn run_fading_pdf(cfg: &SimConfig, n_realizations: u64, opts: &PdfOptions) -> Result<FadingPdf> {
    if n_realizations == 0 {
        return Err(Error::Config("at least one realization required".into()));
    }
    if opts.bins == 0 || !(opts.max_magnitude > 0.0) {
        return Err(Error::Config("histogram needs >= 1 bin and a positive range".into()));
    }
    let g = fading_samples(cfg, n_realizations)?;
    let m = opts.max_magnitude;
    let below = g.iter().filter(|v| v.norm() < opts.threshold).count();
    Ok(FadingPdf {
        magnitude: Histogram::from_samples(g.iter().map(|v| v.norm()), 0.0, m, opts.bins),
        real: Histogram::from_samples(g.iter().map(|v| v.re), -m, m, 2 * opts.bins),
        imag: Histogram::from_samples(g.iter().map(|v| v.im), -m, m, 2 * opts.bins),
        threshold: opts.threshold,
        p_below: below as f64 / n_realizations as f64,
        realizations: n_realizations,
    })
}
