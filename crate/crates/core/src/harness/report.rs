//! Newline-delimited JSON and flat CSV output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Outcome, SuiteRecord, SuiteReport, Summary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

/// One NDJSON line.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Line {
    Record(SuiteRecord),
    Summary(Summary),
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_ndjson(report: &SuiteReport, out: &mut dyn Write) -> Result<()> {
    for r in &report.records {
        serde_json::to_writer(&mut *out, &Line::Record(r.clone())).map_err(io_err)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut *out, &Line::Summary(report.summary.clone())).map_err(io_err)?;
    out.write_all(b"\n")?;
    Ok(())
}

const CSV_HEADER: [&str; 8] = ["scenario_id", "theorem_id", "t", "lhs", "rhs", "margin", "pass", "error"];

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn write_csv(report: &SuiteReport, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in &report.records {
        let row = match &r.outcome {
            Outcome::Inequality(rep) => [
                String::new(),
                num(rep.lhs),
                num(rep.rhs),
                num(rep.margin),
                rep.pass.to_string(),
                String::new(),
            ],
            Outcome::Identity { t, lhs, rhs_kernel_part, rhs_sigma_part, residual, tolerance, pass } => [
                num(*t),
                num(*lhs),
                num(rhs_kernel_part + rhs_sigma_part),
                num(tolerance - residual.abs()),
                pass.to_string(),
                String::new(),
            ],
            Outcome::Error { kind, .. } => {
                [String::new(), String::new(), String::new(), String::new(), String::new(), kind.clone()]
            }
        };
        let mut fields = vec![r.scenario_id.clone(), r.check.clone()];
        fields.extend(row);
        w.write_record(&fields).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &SuiteReport, format: Format, path: Option<&Path>) -> Result<()> {
    let mut out: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        Format::Json => write_ndjson(report, &mut out)?,
        Format::Csv => write_csv(report, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// Reloads an NDJSON report written by [`emit_report`].
pub fn read_ndjson(path: &Path) -> Result<SuiteReport> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut report = SuiteReport::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| Error::ScenarioParse {
            location: format!("line {}, column {}", i + 1, e.column()),
            message: e.to_string(),
        })?;
        match parsed {
            Line::Record(r) => report.records.push(r),
            Line::Summary(s) => report.summary = s,
        }
    }
    Ok(report)
}
