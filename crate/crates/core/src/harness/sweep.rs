use log::{info, warn};
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Csi, Detector, Fading, MatrixBranch, SimConfig};
use super::rng::{substream, StreamDomain};
use crate::channel::{amplitude_profile, sample_delays, sample_gains, MultipathChannel};
use crate::detection::{build_channel_matrix, estimate_g_from_pilots, ml_detect, mmse_detect_with};
use crate::dsp::PulseConfig;
use crate::error::{Error, Result};
use crate::timing::{desired_fading_factor, estimate_offsets, TimingMode};
use crate::waveform::{receive, sigma2_for_snr, Constellation, Frame};

/// Attempts per trial before a solver failure aborts the sweep.
const MAX_ATTEMPTS: u64 = 16;

/// Outcome at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub data_bits: u64,
    pub ber: f64,
    /// Binomial standard error `sqrt(ber (1 - ber) / data_bits)`.
    pub stderr: f64,
    /// Trials redrawn after a solver failure.
    #[serde(default)]
    pub retries: u64,
    /// Standard error from the spread of per-trial error counts. Accounts
    /// for the fading being shared by all bits of a frame; `None` when the
    /// per-trial counts are unknown.
    #[serde(default)]
    pub trial_stderr: Option<f64>,
}

impl BerPoint {
    pub fn new(snr_db: f64, trials: u64, bit_errors: u64, data_bits: u64, retries: u64) -> Self {
        let ber = if data_bits == 0 { 0.0 } else { bit_errors as f64 / data_bits as f64 };
        let stderr = if data_bits == 0 { 0.0 } else { (ber * (1.0 - ber) / data_bits as f64).sqrt() };
        BerPoint { snr_db, trials, bit_errors, data_bits, ber, stderr, retries, trial_stderr: None }
    }

    /// Attaches the between-trial standard error given the sum of squared
    /// per-trial error counts.
    pub fn with_trial_spread(mut self, sum_sq_errors: u128) -> Self {
        if self.trials >= 2 && self.data_bits > 0 {
            let t = self.trials as f64;
            let bits = self.data_bits as f64 / t;
            let mean = self.bit_errors as f64 / t;
            let var = ((sum_sq_errors as f64 - t * mean * mean) / (t - 1.0)).max(0.0);
            self.trial_stderr = Some(var.sqrt() / (bits * t.sqrt()));
        }
        self
    }

    /// Between-trial standard error when known, binomial otherwise.
    pub fn effective_stderr(&self) -> f64 {
        self.trial_stderr.unwrap_or(self.stderr)
    }
}

/// Draws one channel realization according to the configuration.
pub(super) fn draw_channel<R: Rng + ?Sized>(
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<MultipathChannel<f64>> {
    let taus = sample_delays(cfg.n_paths, cfg.delay_spread(), rng);
    let gammas = match cfg.fading {
        Fading::Rayleigh => sample_gains(cfg.n_paths, cfg.kappa, rng),
        Fading::Static => amplitude_profile(cfg.n_paths, cfg.kappa)
            .into_iter()
            .map(|a| Complex::new(a, 0.0))
            .collect(),
    };
    MultipathChannel::new(taus, gammas, cfg.kappa)
}

struct Prepared {
    pulse: PulseConfig<f64>,
    constellation: Constellation<f64>,
}

fn trial_once<R: Rng + ?Sized>(
    cfg: &SimConfig,
    prep: &Prepared,
    sigma2: f64,
    rng: &mut R,
) -> Result<u64> {
    let frame = Frame::random(prep.constellation.clone(), cfg.frame_len, cfg.pilot_len, cfg.es, rng)?;
    let channel = draw_channel(cfg, rng)?;
    let offsets = estimate_offsets(&channel, cfg.timing_mode, &prep.pulse, &cfg.search)?;
    let rx = receive(&frame, &channel, &offsets, &prep.pulse, sigma2, rng)?;
    let pl = cfg.pilot_len;
    let sent = frame.data();

    let detected: Vec<usize> = match cfg.detector {
        Detector::Ml => {
            let g = match cfg.csi {
                Csi::Perfect => desired_fading_factor(&channel, &offsets, &prep.pulse),
                Csi::Pilot => estimate_g_from_pilots(&rx.samples[..pl], &frame.pilot_symbols(), cfg.es)?,
            };
            rx.samples[pl..]
                .iter()
                .map(|r| ml_detect(*r, g, cfg.es, &prep.constellation))
                .collect()
        }
        Detector::Mmse => {
            let tau_hat = match (offsets.mode, cfg.matrix_branch) {
                (TimingMode::Split, MatrixBranch::Quadrature) => offsets.tau_q,
                _ => offsets.tau_i,
            };
            let h = build_channel_matrix(&channel, tau_hat, &prep.pulse, cfg.frame_len)?;
            let out = mmse_detect_with(&h, &rx.samples, sigma2, cfg.es, &prep.constellation, cfg.solver)?;
            out.symbols[pl..].to_vec()
        }
    };
    Ok(sent
        .iter()
        .zip(&detected)
        .map(|(a, b)| prep.constellation.bit_errors(*a, *b) as u64)
        .sum())
}

/// Bit errors of one trial plus the number of redraws it needed.
fn run_trial(cfg: &SimConfig, prep: &Prepared, point: u64, trial: u64, sigma2: f64) -> Result<(u64, u64)> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(cfg.seed, StreamDomain::Ber, point, trial, attempt);
        match trial_once(cfg, prep, sigma2, &mut rng) {
            Ok(errors) => return Ok((errors, attempt)),
            Err(Error::SolverFailure) => {
                warn!("solver failure at point {point} trial {trial} attempt {attempt}; redrawing");
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::SolverFailure)
}

/// Runs `cfg.trials` independent frames per SNR point.
///
/// Each trial draws symbols, a channel realization, searches the sampling
/// offsets, synthesizes and noises the receive samples and counts data-bit
/// errors. Results are bit-identical for a given seed whatever the thread
/// count.
pub fn run_ber_sweep(cfg: &SimConfig) -> Result<Vec<BerPoint>> {
    cfg.validate()?;
    let prep = Prepared { pulse: cfg.pulse()?, constellation: cfg.constellation() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let m = prep.constellation.size();
    let bits_per_frame = cfg.data_bits_per_frame();

    let mut points = Vec::with_capacity(cfg.snr_db_list.len());
    for (idx, &snr_db) in cfg.snr_db_list.iter().enumerate() {
        let snr = 10f64.powf(snr_db / 10.0);
        let sigma2 = sigma2_for_snr(snr, cfg.es, 1.0, m);
        let outcomes: Result<Vec<(u64, u64)>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|trial| run_trial(cfg, &prep, idx as u64, trial, sigma2))
                .collect()
        });
        let outcomes = outcomes?;
        let errors: u64 = outcomes.iter().map(|o| o.0).sum();
        let retries: u64 = outcomes.iter().map(|o| o.1).sum();
        let sum_sq: u128 = outcomes.iter().map(|o| o.0 as u128 * o.0 as u128).sum();
        let point = BerPoint::new(snr_db, cfg.trials, errors, bits_per_frame * cfg.trials, retries)
            .with_trial_spread(sum_sq);
        info!("SNR {snr_db} dB: BER {:.3e} ({} errors)", point.ber, point.bit_errors);
        points.push(point);
    }
    Ok(points)
}
