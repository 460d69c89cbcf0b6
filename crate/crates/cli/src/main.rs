use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use mediumband::dsp::{autocorr, rc_pulse, srrc_phi};
use mediumband::harness::{
    random_channel, run_ber_sweep, run_fading_pdf, write_ber_csv_to, write_pdf_csv_to, Csi, Detector,
    Fading, PdfOptions, Preset, SimConfig,
};
use mediumband::timing::{estimate_offsets, objective_curve};
use mediumband::{Modulation, MultipathChannel64, SearchParams, TimingMode};

/// Monte Carlo simulator for single-carrier links over mediumband multipath
/// channels.
#[derive(Parser, Debug)]
#[command(name = "mbsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BER-versus-SNR sweep.
    Ber {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Distribution of the desired fading factor over channel realizations.
    Pdf {
        #[command(flatten)]
        sim: SimArgs,
        /// Number of channel realizations.
        #[arg(long, default_value_t = 100_000)]
        realizations: u64,
        /// Histogram bins for |g|.
        #[arg(long, default_value_t = PdfOptions::default().bins)]
        bins: usize,
        /// Upper edge of the |g| histogram.
        #[arg(long, default_value_t = PdfOptions::default().max_magnitude)]
        max_magnitude: f64,
        /// Deep-fade threshold for the P_below summary.
        #[arg(long, default_value_t = PdfOptions::default().threshold)]
        threshold: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sampled raised-cosine pulse, root-raised-cosine Phi and autocorrelation.
    DumpFilters {
        #[command(flatten)]
        sim: SimArgs,
        /// Samples per symbol period.
        #[arg(long, default_value_t = 32)]
        points_per_symbol: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Timing objective over the search window for one channel.
    DumpObjective {
        #[command(flatten)]
        sim: SimArgs,
        /// Channel JSON (`taus` in seconds, `gammas` as [re, im] pairs).
        /// Without it a channel is drawn from the seed.
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Realization index of the drawn channel.
        #[arg(long, default_value_t = 0)]
        realization: u64,
        /// Also write the channel used as JSON.
        #[arg(long)]
        channel_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Fig3,
    Fig4,
    #[value(name = "annexA", alias = "annexa")]
    AnnexA,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DetectorArg {
    Mmse,
    Ml,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TimingArg {
    Split,
    Joint,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CsiArg {
    Perfect,
    Pilot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModulationArg {
    Bpsk,
    Qpsk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FadingArg {
    Rayleigh,
    Static,
}

/// Simulation parameters. Precedence: flags, then `--config`, then `--preset`.
#[derive(Args, Debug, Default)]
struct SimArgs {
    /// JSON file with SimConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Symbol period in seconds.
    #[arg(long)]
    ts: Option<f64>,
    /// Roll-off factor in (0, 1].
    #[arg(long)]
    beta: Option<f64>,
    /// Filter half-span in symbols.
    #[arg(long)]
    span_k: Option<usize>,
    /// Power-profile decay.
    #[arg(long)]
    kappa: Option<f64>,
    /// Number of multipath components.
    #[arg(long)]
    paths: Option<usize>,
    /// Percentage delay spread.
    #[arg(long)]
    pds: Option<f64>,
    #[arg(long)]
    frame_len: Option<usize>,
    #[arg(long)]
    pilot_len: Option<usize>,
    /// Symbol energy.
    #[arg(long)]
    es: Option<f64>,
    /// Comma-separated SNR list in dB, e.g. `-3,0,3`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    snr_db: Option<Vec<f64>>,
    /// Trials per SNR point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    detector: Option<DetectorArg>,
    #[arg(long, value_enum)]
    timing: Option<TimingArg>,
    #[arg(long, value_enum)]
    csi: Option<CsiArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    modulation: Option<ModulationArg>,
    #[arg(long, value_enum)]
    fading: Option<FadingArg>,
    /// Timing-search grid points per symbol period.
    #[arg(long)]
    upsample: Option<usize>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl SimArgs {
    fn resolve(&self) -> Result<SimConfig> {
        let mut cfg = match self.preset {
            Some(PresetArg::Fig3) => Preset::Fig3.config(),
            Some(PresetArg::Fig4) => Preset::Fig4.config(),
            Some(PresetArg::AnnexA) | None => Preset::AnnexA.config(),
        };
        if let Some(path) = &self.config {
            cfg = cfg.load_over(path).with_context(|| format!("loading {}", path.display()))?;
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v.into(); })*
            };
        }
        set!(ts => ts, beta => beta, span_k => span_k, kappa => kappa, paths => n_paths,
             pds => pds_percent, frame_len => frame_len, pilot_len => pilot_len, es => es,
             snr_db => snr_db_list, trials => trials, seed => seed, threads => threads);
        if let Some(d) = self.detector {
            cfg.detector = match d {
                DetectorArg::Mmse => Detector::Mmse,
                DetectorArg::Ml => Detector::Ml,
            };
        }
        if let Some(t) = self.timing {
            cfg.timing_mode = match t {
                TimingArg::Split => TimingMode::Split,
                TimingArg::Joint => TimingMode::Joint,
            };
        }
        if let Some(c) = self.csi {
            cfg.csi = match c {
                CsiArg::Perfect => Csi::Perfect,
                CsiArg::Pilot => Csi::Pilot,
            };
        }
        if let Some(m) = self.modulation {
            cfg.modulation = match m {
                ModulationArg::Bpsk => Modulation::Bpsk,
                ModulationArg::Qpsk => Modulation::Qpsk,
            };
        }
        if let Some(f) = self.fading {
            cfg.fading = match f {
                FadingArg::Rayleigh => Fading::Rayleigh,
                FadingArg::Static => Fading::Static,
            };
        }
        if let Some(u) = self.upsample {
            cfg.search = SearchParams::new(u, cfg.search.window_lo, cfg.search.window_hi)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_out(out: &OutArg) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(io::BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn out_name(out: &OutArg) -> String {
    out.out.as_deref().map_or_else(|| "stdout".into(), |p| p.display().to_string())
}

fn write_rows(out: &OutArg, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(open_out(out)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().with_context(|| format!("writing {}", out_name(out)))?;
    Ok(())
}

fn load_channel(path: &Path) -> Result<MultipathChannel64> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MultipathChannel64::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ber { sim, out } => {
            let cfg = sim.resolve()?;
            info!("BER sweep: {} SNR points x {} trials", cfg.snr_db_list.len(), cfg.trials);
            let points = run_ber_sweep(&cfg)?;
            write_ber_csv_to(&points, open_out(&out)?).with_context(|| format!("writing {}", out_name(&out)))?;
        }
        Command::Pdf { sim, realizations, bins, max_magnitude, threshold, out } => {
            let cfg = sim.resolve()?;
            let opts = PdfOptions { bins, max_magnitude, threshold };
            let pdf = run_fading_pdf(&cfg, realizations, &opts)?;
            info!("P(|g| < {threshold}) = {}", pdf.p_below);
            write_pdf_csv_to(&pdf, open_out(&out)?).with_context(|| format!("writing {}", out_name(&out)))?;
        }
        Command::DumpFilters { sim, points_per_symbol, out } => {
            let cfg = sim.resolve()?.pulse()?;
            anyhow::ensure!(points_per_symbol > 0, "--points-per-symbol must be positive");
            let half = (cfg.span_k() * points_per_symbol) as i64;
            let step = cfg.ts() / points_per_symbol as f64;
            let rows = (-half..=half).map(|i| {
                let t = i as f64 * step;
                vec![t, rc_pulse(t, &cfg), srrc_phi(t, &cfg), autocorr(t, &cfg)]
            });
            write_rows(&out, &["t", "rc_pulse", "srrc_phi", "autocorr"], rows)?;
        }
        Command::DumpObjective { sim, channel, realization, channel_out, out } => {
            let cfg = sim.resolve()?;
            let pulse = cfg.pulse()?;
            let ch = match &channel {
                Some(path) => load_channel(path)?,
                None => random_channel(&cfg, realization)?,
            };
            if let Some(path) = &channel_out {
                std::fs::write(path, ch.to_json()?).with_context(|| format!("writing {}", path.display()))?;
            }
            let offsets = estimate_offsets(&ch, cfg.timing_mode, &pulse, &cfg.search)?;
            info!("offsets: in-phase {:e} s, quadrature {:e} s", offsets.tau_i, offsets.tau_q);
            let re: Vec<f64> = ch.gammas().iter().map(|g| g.re).collect();
            let im: Vec<f64> = ch.gammas().iter().map(|g| g.im).collect();
            let joint = objective_curve(ch.gammas(), ch.taus(), &pulse, &cfg.search)?;
            let ip = objective_curve(&re, ch.taus(), &pulse, &cfg.search)?;
            let q = objective_curve(&im, ch.taus(), &pulse, &cfg.search)?;
            let rows = joint.iter().zip(&ip).zip(&q).map(|((j, i), q)| vec![j.0, j.1, i.1, q.1]);
            write_rows(&out, &["t", "joint", "in_phase", "quadrature"], rows)?;
        }
    }
    Ok(())
}

fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
