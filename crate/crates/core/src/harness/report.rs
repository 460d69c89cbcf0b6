//! CSV reports.
//!
//! BER files carry the header `snr_db,ber,bit_errors,data_bits,trials,stderr`;
//! fading-PDF files carry `bin_left,bin_right,density` followed by a
//! `#P_below,<threshold>,<value>` summary row. Floats are written in the
//! shortest decimal form that parses back to the same value.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::pdf::FadingPdf;
use super::sweep::BerPoint;
use crate::error::{Error, Result};

const BER_HEADER: [&str; 6] = ["snr_db", "ber", "bit_errors", "data_bits", "trials", "stderr"];
const PDF_HEADER: [&str; 3] = ["bin_left", "bin_right", "density"];
const SUMMARY_TAG: &str = "#P_below";

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_ber_csv_to<W: Write>(points: &[BerPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BER_HEADER)?;
    for p in points {
        w.write_record([
            p.snr_db.to_string(),
            p.ber.to_string(),
            p.bit_errors.to_string(),
            p.data_bits.to_string(),
            p.trials.to_string(),
            p.stderr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes (or overwrites) a BER report.
pub fn write_ber_csv(points: &[BerPoint], path: &Path) -> Result<()> {
    write_ber_csv_to(points, create(path)?).map_err(csv_err(path))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    rec.get(i).and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::CsvFormat {
        path: path.to_path_buf(),
        reason: format!("bad field {i} in record {rec:?}"),
    })
}

pub fn read_ber_csv(path: &Path) -> Result<Vec<BerPoint>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().collect::<Vec<_>>() != BER_HEADER {
        return Err(Error::CsvFormat { path: path.to_path_buf(), reason: format!("unexpected header {header:?}") });
    }
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        points.push(BerPoint {
            snr_db: field(&rec, 0, path)?,
            ber: field(&rec, 1, path)?,
            bit_errors: field(&rec, 2, path)?,
            data_bits: field(&rec, 3, path)?,
            trials: field(&rec, 4, path)?,
            stderr: field(&rec, 5, path)?,
            retries: 0,
            trial_stderr: None,
        });
    }
    Ok(points)
}

/// Writes the magnitude histogram and the deep-fade summary row.
pub fn write_pdf_csv_to<W: Write>(pdf: &FadingPdf, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PDF_HEADER)?;
    for (l, r, d) in pdf.magnitude.bins() {
        w.write_record([l.to_string(), r.to_string(), d.to_string()])?;
    }
    w.write_record([SUMMARY_TAG.to_string(), pdf.threshold.to_string(), pdf.p_below.to_string()])?;
    w.flush()?;
    Ok(())
}

pub fn write_pdf_csv(pdf: &FadingPdf, path: &Path) -> Result<()> {
    write_pdf_csv_to(pdf, create(path)?).map_err(csv_err(path))
}

/// Parsed fading-PDF report.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfCsv {
    pub bins: Vec<(f64, f64, f64)>,
    /// `(threshold, probability)` from the summary row.
    pub p_below: Option<(f64, f64)>,
}

pub fn read_pdf_csv(path: &Path) -> Result<PdfCsv> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().collect::<Vec<_>>() != PDF_HEADER {
        return Err(Error::CsvFormat { path: path.to_path_buf(), reason: format!("unexpected header {header:?}") });
    }
    let mut out = PdfCsv { bins: Vec::new(), p_below: None };
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        if rec.get(0) == Some(SUMMARY_TAG) {
            out.p_below = Some((field(&rec, 1, path)?, field(&rec, 2, path)?));
        } else {
            out.bins.push((field(&rec, 0, path)?, field(&rec, 1, path)?, field(&rec, 2, path)?));
        }
    }
    Ok(out)
}
