use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detection::MmseSolver;
use crate::dsp::PulseConfig;
use crate::error::{Error, Result};
use crate::timing::{SearchParams, TimingMode};
use crate::waveform::{Constellation, Modulation};

/// Detector used on the receive samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    /// Frame-level MMSE on the banded channel matrix.
    Mmse,
    /// Symbol-wise ML against the desired fading factor.
    Ml,
}

/// Channel knowledge available to the ML detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Csi {
    Perfect,
    Pilot,
}

/// How path gains are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fading {
    /// Complex Gaussian gains on the exponential power profile.
    Rayleigh,
    /// Deterministic real gains equal to the amplitude profile.
    Static,
}

/// Which split-timing offset drives the matrix model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixBranch {
    InPhase,
    Quadrature,
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Short frames (L = 40) with MMSE detection and perfect channel matrix.
    Fig3,
    /// L = 200, split timing, ML detection with perfect fading factor.
    Fig4,
    /// L = 250, PL = 50, split timing, ML, 5000 trials per SNR point.
    AnnexA,
}

impl Preset {
    pub fn config(self) -> SimConfig {
        let base = SimConfig::default();
        match self {
            Preset::AnnexA => base,
            Preset::Fig3 => SimConfig {
                frame_len: 40,
                pilot_len: 0,
                detector: Detector::Mmse,
                timing_mode: TimingMode::Joint,
                ..base
            },
            Preset::Fig4 => SimConfig { frame_len: 200, ..base },
        }
    }
}

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Symbol period in seconds.
    pub ts: f64,
    pub beta: f64,
    pub span_k: usize,
    pub kappa: f64,
    pub n_paths: usize,
    pub pds_percent: f64,
    pub frame_len: usize,
    pub pilot_len: usize,
    pub es: f64,
    pub snr_db_list: Vec<f64>,
    pub trials: u64,
    pub detector: Detector,
    pub timing_mode: TimingMode,
    pub csi: Csi,
    pub seed: u64,
    pub modulation: Modulation,
    pub fading: Fading,
    pub matrix_branch: MatrixBranch,
    pub solver: MmseSolver,
    pub search: SearchParams,
    /// Worker threads; 0 lets rayon decide. Never affects results.
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ts: 5e-7,
            beta: 0.22,
            span_k: 6,
            kappa: 0.0,
            n_paths: 10,
            pds_percent: 60.0,
            frame_len: 250,
            pilot_len: 50,
            es: 1.0,
            snr_db_list: (0..=7).map(|i| 3.0 * i as f64).collect(),
            trials: 5000,
            detector: Detector::Ml,
            timing_mode: TimingMode::Split,
            csi: Csi::Perfect,
            seed: 1,
            modulation: Modulation::Bpsk,
            fading: Fading::Rayleigh,
            matrix_branch: MatrixBranch::InPhase,
            solver: MmseSolver::Banded,
            search: SearchParams::default(),
            threads: 0,
        }
    }
}

impl SimConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Parses a JSON object whose fields override those of `self`; fields
    /// absent from the object keep their current values.
    pub fn from_json_over(&self, s: &str) -> Result<Self> {
        let overrides: serde_json::Value = serde_json::from_str(s)?;
        let serde_json::Value::Object(overrides) = overrides else {
            return Err(Error::Config("configuration must be a JSON object".into()));
        };
        let mut merged = serde_json::to_value(self)?;
        if let serde_json::Value::Object(fields) = &mut merged {
            fields.extend(overrides);
        }
        Ok(serde_json::from_value(merged)?)
    }

    pub fn load_over(&self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        self.from_json_over(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Delay spread `T_m` in seconds.
    pub fn delay_spread(&self) -> f64 {
        self.pds_percent / 100.0 * self.ts
    }

    pub fn pulse(&self) -> Result<PulseConfig<f64>> {
        PulseConfig::new(self.ts, self.beta, self.span_k)
    }

    pub fn constellation(&self) -> Constellation<f64> {
        Constellation::from_modulation(self.modulation)
    }

    /// Data bits per frame (pilots excluded).
    pub fn data_bits_per_frame(&self) -> u64 {
        ((self.frame_len - self.pilot_len) as u64) * self.constellation().bits_per_symbol() as u64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.pulse()?;
        self.search.validate()?;
        if self.n_paths == 0 {
            return bad("at least one path required".into());
        }
        if !(self.pds_percent >= 0.0) || !self.pds_percent.is_finite() {
            return bad(format!("PDS must be >= 0, got {}", self.pds_percent));
        }
        if !(self.kappa >= 0.0) {
            return bad(format!("kappa must be >= 0, got {}", self.kappa));
        }
        if !(self.es > 0.0) {
            return bad(format!("symbol energy must be > 0, got {}", self.es));
        }
        if self.frame_len <= self.pilot_len {
            return bad(format!(
                "frame length {} must exceed pilot length {}",
                self.frame_len, self.pilot_len
            ));
        }
        if self.frame_len <= self.span_k {
            return bad(format!(
                "frame length {} must exceed filter half-span {}",
                self.frame_len, self.span_k
            ));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.trials >= 1 << 40 {
            return bad("too many trials per point".into());
        }
        if self.snr_db_list.len() >= 1 << 12 {
            return bad("too many SNR points".into());
        }
        if self.snr_db_list.iter().any(|s| !s.is_finite()) {
            return bad("SNR values must be finite".into());
        }
        if !self.search.covers(self.delay_spread(), self.ts) {
            return bad("timing search window must cover [0, T_m]".into());
        }
        if self.timing_mode == TimingMode::Split && !self.constellation().is_real() {
            return bad("split timing requires a real constellation (use --timing joint)".into());
        }
        if self.csi == Csi::Pilot {
            if self.detector != Detector::Ml {
                return bad("pilot CSI is only available with the ML detector".into());
            }
            if self.pilot_len == 0 {
                return bad("pilot CSI needs at least one pilot".into());
            }
        }
        Ok(())
    }
}
