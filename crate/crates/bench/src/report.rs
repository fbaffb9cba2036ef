//! Benchmark reports and their CSV and JSON encodings.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{usage, BenchError, Result};

/// Column order of the CSV encoding.
pub const CSV_HEADER: [&str; 8] = ["env", "method", "episodes", "seed", "mean", "std", "ratio", "seconds"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub env: String,
    pub method: String,
    pub episodes: usize,
    pub seed: u64,
    pub mean: f64,
    /// Population standard deviation of the episode totals.
    pub std: f64,
    /// 1 for the reference method, at least 1 otherwise; infinite when the
    /// method's mean has the wrong sign to compare.
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub ratio: f64,
    pub seconds: f64,
}

/// One row per method, reference first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn row(&self, method: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(usage(format!("unknown report format '{s}'; valid formats: csv, json"))),
        }
    }
}

fn ser_ratio<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str("inf")
    }
}

fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Ratio {
        Number(f64),
        Text(String),
    }
    match Ratio::deserialize(d)? {
        Ratio::Number(x) => Ok(x),
        Ratio::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Ratio::Text(t) => Err(serde::de::Error::custom(format!("bad ratio '{t}'"))),
    }
}

/// Writes `report`. Numbers use the shortest decimal form that parses back
/// to the same `f64`, so [`parse_report`] recovers the report exactly.
pub fn write_report<W: Write>(report: &BenchmarkReport, format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in &report.rows {
                w.write_record([
                    r.env.clone(),
                    r.method.clone(),
                    r.episodes.to_string(),
                    r.seed.to_string(),
                    r.mean.to_string(),
                    r.std.to_string(),
                    r.ratio.to_string(),
                    r.seconds.to_string(),
                ])?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &report.rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn emit_report(report: &BenchmarkReport, format: ReportFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_report(report, format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn parse_report<R: Read>(input: R, format: ReportFormat) -> Result<BenchmarkReport> {
    match format {
        ReportFormat::Json => Ok(BenchmarkReport { rows: serde_json::from_reader(input)? }),
        ReportFormat::Csv => {
            let mut rdr = csv::Reader::from_reader(input);
            let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
            if header != CSV_HEADER {
                return Err(BenchError::Report { line: 1, msg: format!("expected header {}", CSV_HEADER.join(",")) });
            }
            let mut rows = Vec::new();
            for (k, rec) in rdr.records().enumerate() {
                let line = k + 2;
                let rec = rec?;
                if rec.len() != CSV_HEADER.len() {
                    return Err(BenchError::Report { line, msg: format!("expected 8 fields, got {}", rec.len()) });
                }
                let bad = |i: usize| BenchError::Report { line, msg: format!("bad {} '{}'", CSV_HEADER[i], &rec[i]) };
                let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(i));
                rows.push(ReportRow {
                    env: rec[0].to_string(),
                    method: rec[1].to_string(),
                    episodes: rec[2].parse().map_err(|_| bad(2))?,
                    seed: rec[3].parse().map_err(|_| bad(3))?,
                    mean: num(4)?,
                    std: num(5)?,
                    ratio: num(6)?,
                    seconds: num(7)?,
                });
            }
            Ok(BenchmarkReport { rows })
        }
    }
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<BenchmarkReport> {
    parse_report(File::open(path)?, format)
}
