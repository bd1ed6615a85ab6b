//! Result rows and their CSV encoding.
//!
//! The header is fixed: `variant,measure,n,k,m,epsilon,trials,mean,stderr,seed`.
//! Floats are written in shortest round-trip form, so identical estimates
//! always produce identical bytes.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use sc_rates::estimators::{Measure, RateEstimate};
use sc_rates::Variant;

use crate::error::CliError;

pub const CSV_HEADER: &str = "variant,measure,n,k,m,epsilon,trials,mean,stderr,seed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub variant: String,
    pub measure: String,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl From<&RateEstimate> for ResultRow {
    fn from(e: &RateEstimate) -> Self {
        ResultRow {
            variant: e.variant.flag().to_owned(),
            measure: e.measure.flag().to_owned(),
            n: e.n,
            k: e.k,
            m: e.m,
            epsilon: e.epsilon,
            trials: e.trials,
            mean: e.mean,
            stderr: e.stderr,
            seed: e.seed,
        }
    }
}

impl ResultRow {
    pub fn variant(&self) -> Result<Variant, sc_rates::Error> {
        self.variant.parse()
    }

    pub fn measure(&self) -> Result<Measure, sc_rates::Error> {
        self.measure.parse()
    }
}

fn encode<W: Write>(writer: W, rows: &[ResultRow], header: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header)
        .from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Header line plus rows, as a string.
pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    if rows.is_empty() {
        buf.extend_from_slice(CSV_HEADER.as_bytes());
        buf.push(b'\n');
    } else {
        encode(&mut buf, rows, true).expect("writing to memory");
    }
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Writes a fresh CSV file.
pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut file = std::io::BufWriter::new(file);
    file.write_all(to_csv_string(rows).as_bytes())
        .and_then(|_| file.flush())
        .map_err(CliError::io(path))
}

/// Appends rows, writing the header first when the file is new or empty.
pub fn append_csv(path: &Path, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(CliError::io(path))?;
    let empty = file.metadata().map_err(CliError::io(path))?.len() == 0;
    let mut buf = Vec::new();
    if empty && rows.is_empty() {
        buf.extend_from_slice(CSV_HEADER.as_bytes());
        buf.push(b'\n');
    } else {
        encode(&mut buf, rows, empty).map_err(CliError::csv(path))?;
    }
    file.write_all(&buf).map_err(CliError::io(path))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
    let header = reader.headers().map_err(CliError::csv(path))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(CliError::Usage(format!(
            "{}: unexpected header (expected `{CSV_HEADER}`)",
            path.display()
        )));
    }
    reader
        .deserialize()
        .collect::<Result<Vec<ResultRow>, _>>()
        .map_err(CliError::csv(path))
}
