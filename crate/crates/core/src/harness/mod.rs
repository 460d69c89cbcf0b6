//! Seeded Monte Carlo driver: BER sweeps, fading-factor statistics and CSV
//! reports.

mod config;
mod pdf;
mod report;
mod rng;
mod sweep;

pub use config::{Csi, Detector, Fading, MatrixBranch, Preset, SimConfig};
pub use pdf::{fading_samples, random_channel, run_fading_pdf, FadingPdf, Histogram, PdfOptions};
pub use report::{
    read_ber_csv, read_pdf_csv, write_ber_csv, write_ber_csv_to, write_pdf_csv, write_pdf_csv_to,
    PdfCsv,
};
pub use rng::{substream, StreamDomain};
pub use sweep::{run_ber_sweep, BerPoint};
