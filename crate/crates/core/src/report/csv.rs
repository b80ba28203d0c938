//! Measurement rows in a fixed CSV schema.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::bench::Measurement;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 14] = [
    "algorithm",
    "mode",
    "width",
    "payload",
    "distribution",
    "n",
    "reps",
    "mean_ms",
    "stddev_ms",
    "sort_rate_mps",
    "workers",
    "pivot",
    "fusion",
    "radix_bits",
];

/// One CSV line, as written or read back.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub algorithm: String,
    pub mode: String,
    pub width: u32,
    pub payload: String,
    pub distribution: String,
    pub n: usize,
    pub reps: usize,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub sort_rate_mps: f64,
    pub workers: usize,
    pub pivot: String,
    pub fusion: usize,
    pub radix_bits: u32,
}

impl CsvRow {
    pub fn from_measurement(m: &Measurement) -> Self {
        CsvRow {
            algorithm: m.algorithm.name().into(),
            mode: m.mode.name().into(),
            width: m.width.bits(),
            payload: m.payload.as_str().into(),
            distribution: m.distribution.name().into(),
            n: m.n,
            reps: m.repetitions,
            mean_ms: m.mean_time * 1e3,
            stddev_ms: m.stddev_time * 1e3,
            sort_rate_mps: m.sort_rate,
            workers: m.workers,
            pivot: m.pivot.name().into(),
            fusion: m.fusion,
            radix_bits: m.radix_bits,
        }
    }

    fn fields(&self) -> [String; 14] {
        [
            self.algorithm.clone(),
            self.mode.clone(),
            self.width.to_string(),
            self.payload.clone(),
            self.distribution.clone(),
            self.n.to_string(),
            self.reps.to_string(),
            format!("{:.6}", self.mean_ms),
            format!("{:.6}", self.stddev_ms),
            format!("{:.3}", self.sort_rate_mps),
            self.workers.to_string(),
            self.pivot.clone(),
            self.fusion.to_string(),
            self.radix_bits.to_string(),
        ]
    }

    fn parse(rec: &::csv::StringRecord) -> Result<Self> {
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Io(format!(
                "expected {} CSV fields, found {}",
                CSV_HEADER.len(),
                rec.len()
            )));
        }
        fn num<T: std::str::FromStr>(rec: &::csv::StringRecord, i: usize) -> Result<T> {
            rec[i]
                .parse()
                .map_err(|_| Error::Io(format!("bad {} value {:?}", CSV_HEADER[i], &rec[i])))
        }
        Ok(CsvRow {
            algorithm: rec[0].into(),
            mode: rec[1].into(),
            width: num(rec, 2)?,
            payload: rec[3].into(),
            distribution: rec[4].into(),
            n: num(rec, 5)?,
            reps: num(rec, 6)?,
            mean_ms: num(rec, 7)?,
            stddev_ms: num(rec, 8)?,
            sort_rate_mps: num(rec, 9)?,
            workers: num(rec, 10)?,
            pivot: rec[11].into(),
            fusion: num(rec, 12)?,
            radix_bits: num(rec, 13)?,
        })
    }
}

/// Writes the header and one row per valid measurement; returns the number
/// of rows written.
pub fn write_csv_to<W: Write>(measurements: &[Measurement], out: W) -> Result<usize> {
    let mut w = ::csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let mut rows = 0;
    for m in measurements.iter().filter(|m| m.is_valid()) {
        w.write_record(CsvRow::from_measurement(m).fields())?;
        rows += 1;
    }
    w.flush()?;
    Ok(rows)
}

pub fn write_csv(measurements: &[Measurement], path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv_to(measurements, file)
}

pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = ::csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Io(format!("unexpected CSV header {:?}", header)));
    }
    r.records().map(|rec| CsvRow::parse(&rec?)).collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv_from(file)
}
