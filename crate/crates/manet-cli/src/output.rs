//! Output sinks and the CSV row schemas.
//!
//! CSV dialect: comma separators, one header row, `.` decimals regardless of
//! locale, empty cells for absent values, and infinities as the literal
//! `inf`. Floats are written in shortest round-trip form, so parsing an
//! emitted file reproduces the in-memory rows exactly.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::cli::OutputFormat;
use crate::HarnessError;

/// Where and how a command writes its result.
#[derive(Debug, Clone)]
pub struct Output {
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

impl Output {
    pub fn new(path: Option<PathBuf>, format: Option<OutputFormat>) -> Result<Self, HarnessError> {
        Ok(Output { path, format })
    }

    pub fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(default)
    }

    pub fn write(&self, content: &str) -> Result<(), HarnessError> {
        match &self.path {
            Some(path) => {
                fs::write(path, content)
                    .map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", path.display())))
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(content.as_bytes())?;
                if !content.ends_with('\n') {
                    lock.write_all(b"\n")?;
                }
                Ok(())
            }
        }
    }
}

/// Pass/fail verdict of one validation row. `Inconclusive` marks rows where
/// the simulation confidence interval is too wide to judge the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Inconclusive,
    Fail,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Pass => "pass",
            RowStatus::Inconclusive => "inconclusive",
            RowStatus::Fail => "fail",
        })
    }
}

impl std::str::FromStr for RowStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(RowStatus::Pass),
            "inconclusive" => Ok(RowStatus::Inconclusive),
            "fail" => Ok(RowStatus::Fail),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

/// One theory-versus-simulation comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    /// Swept parameter name (the scenario's own lambda_s when nothing sweeps).
    pub param: String,
    pub value: f64,
    pub feedback: bool,
    pub t_theory: f64,
    pub t_sim: f64,
    pub t_rel_err: f64,
    pub t_ci: f64,
    pub ed_theory: f64,
    pub ed_sim: Option<f64>,
    pub ed_rel_err: Option<f64>,
    pub ed_ci: f64,
    pub status: RowStatus,
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_f64(s: &str) -> Result<f64, HarnessError> {
    s.parse()
        .map_err(|_| HarnessError::Config(format!("bad float `{s}` in CSV")))
}

fn parse_opt(s: &str) -> Result<Option<f64>, HarnessError> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

impl ComparisonRow {
    pub const HEADER: [&'static str; 12] = [
        "param", "value", "feedback", "t_theory", "t_sim", "t_rel_err", "t_ci", "ed_theory",
        "ed_sim", "ed_rel_err", "ed_ci", "status",
    ];

    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.param.clone(),
            fmt_f64(self.value),
            self.feedback.to_string(),
            fmt_f64(self.t_theory),
            fmt_f64(self.t_sim),
            fmt_f64(self.t_rel_err),
            fmt_f64(self.t_ci),
            fmt_f64(self.ed_theory),
            fmt_opt(self.ed_sim),
            fmt_opt(self.ed_rel_err),
            fmt_f64(self.ed_ci),
            self.status.to_string(),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self, HarnessError> {
        if rec.len() != Self::HEADER.len() {
            return Err(HarnessError::Config(format!(
                "expected {} CSV fields, got {}",
                Self::HEADER.len(),
                rec.len()
            )));
        }
        Ok(ComparisonRow {
            param: rec[0].to_string(),
            value: parse_f64(&rec[1])?,
            feedback: rec[2]
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad bool `{}`", &rec[2])))?,
            t_theory: parse_f64(&rec[3])?,
            t_sim: parse_f64(&rec[4])?,
            t_rel_err: parse_f64(&rec[5])?,
            t_ci: parse_f64(&rec[6])?,
            ed_theory: parse_f64(&rec[7])?,
            ed_sim: parse_opt(&rec[8])?,
            ed_rel_err: parse_opt(&rec[9])?,
            ed_ci: parse_f64(&rec[10])?,
            status: rec[11]
                .parse()
                .map_err(HarnessError::Config)?,
        })
    }
}

/// One sweep point; simulation columns stay empty without `--with-sim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub feedback: bool,
    pub t_theory: f64,
    pub ed_theory: f64,
    pub capacity: f64,
    pub source_empty: f64,
    pub relay_overflow: f64,
    pub service_rate: f64,
    pub t_sim: Option<f64>,
    pub ed_sim: Option<f64>,
    pub t_ci: Option<f64>,
    pub ed_ci: Option<f64>,
}

impl SweepRow {
    pub const HEADER: [&'static str; 13] = [
        "param",
        "value",
        "feedback",
        "t_theory",
        "ed_theory",
        "capacity",
        "source_empty",
        "relay_overflow",
        "service_rate",
        "t_sim",
        "ed_sim",
        "t_ci",
        "ed_ci",
    ];

    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.param.clone(),
            fmt_f64(self.value),
            self.feedback.to_string(),
            fmt_f64(self.t_theory),
            fmt_f64(self.ed_theory),
            fmt_f64(self.capacity),
            fmt_f64(self.source_empty),
            fmt_f64(self.relay_overflow),
            fmt_f64(self.service_rate),
            fmt_opt(self.t_sim),
            fmt_opt(self.ed_sim),
            fmt_opt(self.t_ci),
            fmt_opt(self.ed_ci),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self, HarnessError> {
        if rec.len() != Self::HEADER.len() {
            return Err(HarnessError::Config(format!(
                "expected {} CSV fields, got {}",
                Self::HEADER.len(),
                rec.len()
            )));
        }
        Ok(SweepRow {
            param: rec[0].to_string(),
            value: parse_f64(&rec[1])?,
            feedback: rec[2]
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad bool `{}`", &rec[2])))?,
            t_theory: parse_f64(&rec[3])?,
            ed_theory: parse_f64(&rec[4])?,
            capacity: parse_f64(&rec[5])?,
            source_empty: parse_f64(&rec[6])?,
            relay_overflow: parse_f64(&rec[7])?,
            service_rate: parse_f64(&rec[8])?,
            t_sim: parse_opt(&rec[9])?,
            ed_sim: parse_opt(&rec[10])?,
            t_ci: parse_opt(&rec[11])?,
            ed_ci: parse_opt(&rec[12])?,
        })
    }
}

/// Serializes records to CSV text.
pub fn to_csv(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory CSV write");
    for rec in records {
        writer.write_record(&rec).expect("in-memory CSV write");
    }
    String::from_utf8(writer.into_inner().expect("flushed CSV buffer"))
        .expect("CSV output is UTF-8")
}
