//! Report rows and their CSV / JSON renderings.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// One-dimensional projection of `(S, Y)` a row compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    S,
    Y,
    #[serde(rename = "pair_sum")]
    PairSum,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S => "S",
            Self::Y => "Y",
            Self::PairSum => "pair_sum",
        })
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(Self::S),
            "Y" => Ok(Self::Y),
            "pair_sum" => Ok(Self::PairSum),
            other => Err(Error::Argument(format!("unknown quantity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment_id: String,
    pub n: usize,
    pub t: f64,
    pub quantity: Quantity,
    pub ks_stat: f64,
    pub ks_threshold: f64,
    pub pass: bool,
    pub ecf_dist: f64,
    pub b1_gap: f64,
    pub c11_gap: f64,
    pub c22_gap: f64,
    pub vague_sup: f64,
    pub hill_alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (csv|json)"
            ))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 14] = [
    "experiment_id",
    "n",
    "t",
    "quantity",
    "ks_stat",
    "ks_threshold",
    "pass",
    "ecf_dist",
    "b1_gap",
    "c11_gap",
    "c22_gap",
    "vague_sup",
    "hill_alpha",
    "seed",
];

/// 17 significant digits: reparsing gives the same bits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let record = |r: &ReportRow| {
        [
            r.experiment_id.clone(),
            r.n.to_string(),
            format_float(r.t),
            r.quantity.to_string(),
            format_float(r.ks_stat),
            format_float(r.ks_threshold),
            r.pass.to_string(),
            format_float(r.ecf_dist),
            format_float(r.b1_gap),
            format_float(r.c11_gap),
            format_float(r.c22_gap),
            format_float(r.vague_sup),
            format_float(r.hill_alpha),
            r.seed.to_string(),
        ]
    };
    w.write_record(CSV_COLUMNS).expect("writing to memory");
    for r in rows {
        w.write_record(record(r)).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::Argument(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(csv_error))
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Argument(format!("malformed report CSV: {e}"))
}

pub fn report_to_json(report: &ExperimentReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Writes `<dir>/<experiment_id>.<ext>` and returns its path.
pub fn emit_report(report: &ExperimentReport, format: OutputFormat, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!(
        "{}.{}",
        report.config.experiment_id,
        format.extension()
    ));
    let body = match format {
        OutputFormat::Csv => rows_to_csv(&report.rows),
        OutputFormat::Json => report_to_json(report)?,
    };
    fs::write(&path, body)?;
    Ok(path)
}
