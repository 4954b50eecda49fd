//! Report output as CSV or JSON lines.
//!
//! Floating-point values are written in shortest round-trip decimal form, so
//! reading a report back reproduces the in-memory values exactly.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::selection::{PenaltySchedule, SelectionResult};
use crate::simulation::{ProbeTable, ReplicationRecord, StudySummary, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json-lines" | "jsonl" => Ok(Self::JsonLines),
            other => Err(format!("unknown output format `{other}` (csv or json-lines)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::JsonLines => "json-lines",
        })
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}, line {line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Header metadata for a selection report.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMeta {
    pub penalties: PenaltySchedule,
    pub seed: Option<u64>,
}

struct Sink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Sink {
    fn create(path: &Path) -> Result<Self, ReportError> {
        let file = File::create(path).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    fn line(&mut self, s: &str) -> Result<(), ReportError> {
        writeln!(self.out, "{s}").map_err(|source| ReportError::Io {
            path: self.path.clone(),
            source,
        })
    }

    fn json(&mut self, v: &impl Serialize) -> Result<(), ReportError> {
        let s = serde_json::to_string(v).map_err(|source| ReportError::Json {
            path: self.path.clone(),
            line: 0,
            source,
        })?;
        self.line(&s)
    }

    fn csv_rows<T: Serialize>(self, rows: &[T]) -> Result<(), ReportError> {
        let path = self.path.clone();
        let csv_err = |source| ReportError::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_writer(self.out);
        for r in rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush().map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })
    }

    fn finish(mut self) -> Result<(), ReportError> {
        self.out.flush().map_err(|source| ReportError::Io {
            path: self.path,
            source,
        })
    }
}

#[derive(Serialize)]
struct VariableRecord {
    rank: usize,
    variable: usize,
    phi: f64,
    psi: f64,
    selected: bool,
}

/// One record per rank position: `(rank, variable, phi, psi, selected)`.
pub fn emit_selection(
    result: &SelectionResult,
    meta: &SelectionMeta,
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<(), ReportError> {
    let records: Vec<VariableRecord> = result
        .sigma_hat
        .iter()
        .enumerate()
        .map(|(i, &label)| VariableRecord {
            rank: i + 1,
            variable: label,
            phi: result.phi[label - 1],
            psi: result.psi[i],
            selected: result.is_selected_rank(i + 1),
        })
        .collect();
    let pen = &meta.penalties;
    let mut sink = Sink::create(path.as_ref())?;
    match format {
        OutputFormat::Csv => {
            sink.line(&format!("# n={}", result.n))?;
            sink.line(&format!("# {pen}"))?;
            if let Some(seed) = meta.seed {
                sink.line(&format!("# seed={seed}"))?;
            }
            sink.line(&format!("# s_hat={}", result.s_hat))?;
            sink.csv_rows(&records)
        }
        OutputFormat::JsonLines => {
            sink.json(&json!({
                "record": "meta",
                "n": result.n,
                "f_rate": pen.f_rate(),
                "f_shape": pen.f_shape().to_string(),
                "g_rate": pen.g_rate(),
                "g_shape": pen.g_shape().to_string(),
                "penalty_arg": pen.penalty_arg().to_string(),
                "psi_scale": pen.psi_scale().to_string(),
                "seed": meta.seed,
                "s_hat": result.s_hat,
                "selected": result.selected,
            }))?;
            for r in &records {
                sink.json(r)?;
            }
            sink.finish()
        }
    }
}

/// One record per sample size, ascending in `n`.
pub fn emit_study(
    summary: &StudySummary,
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<(), ReportError> {
    let mut rows = summary.rows.clone();
    rows.sort_by_key(|r| r.n);
    let mut sink = Sink::create(path.as_ref())?;
    match format {
        OutputFormat::Csv => sink.csv_rows(&rows),
        OutputFormat::JsonLines => {
            for r in &rows {
                sink.json(r)?;
            }
            sink.finish()
        }
    }
}

/// Reads a summary written by [`emit_study`].
pub fn read_study_summary(
    path: impl AsRef<Path>,
    format: OutputFormat,
) -> Result<StudySummary, ReportError> {
    let path = path.as_ref();
    let io_err = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let rows = match format {
        OutputFormat::Csv => csv::Reader::from_reader(file)
            .deserialize::<SummaryRow>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| ReportError::Csv {
                path: path.to_path_buf(),
                source,
            })?,
        OutputFormat::JsonLines => {
            let mut rows = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                rows.push(serde_json::from_str(&line).map_err(|source| ReportError::Json {
                    path: path.to_path_buf(),
                    line: i + 1,
                    source,
                })?);
            }
            rows
        }
    };
    Ok(StudySummary { rows })
}

#[derive(Serialize)]
struct RecordRow {
    n: usize,
    rep_index: u64,
    seed: u64,
    status: &'static str,
    selected: String,
    correct: Option<bool>,
    pred_error: Option<f64>,
    oracle_pred_error: Option<f64>,
    criterion_at_truth: Option<f64>,
    message: String,
}

/// Per-replication records, in the order given.
pub fn emit_records(
    records: &[ReplicationRecord],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<(), ReportError> {
    let rows: Vec<RecordRow> = records
        .iter()
        .map(|r| match r {
            Ok(o) => RecordRow {
                n: o.n,
                rep_index: o.rep_index,
                seed: o.seed,
                status: "ok",
                selected: o
                    .selected
                    .iter()
                    .map(|j| j.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                correct: Some(o.correct),
                pred_error: Some(o.pred_error),
                oracle_pred_error: Some(o.oracle_pred_error),
                criterion_at_truth: o.criterion_at_truth,
                message: String::new(),
            },
            Err(f) => RecordRow {
                n: f.n,
                rep_index: f.rep_index,
                seed: f.seed,
                status: f.reason.code(),
                selected: String::new(),
                correct: None,
                pred_error: None,
                oracle_pred_error: None,
                criterion_at_truth: None,
                message: f.message.clone(),
            },
        })
        .collect();
    let mut sink = Sink::create(path.as_ref())?;
    match format {
        OutputFormat::Csv => sink.csv_rows(&rows),
        OutputFormat::JsonLines => {
            for r in &rows {
                sink.json(r)?;
            }
            sink.finish()
        }
    }
}

/// Probe table: one record per `n`, preceded by the subset and its
/// population criterion.
pub fn emit_probe(
    table: &ProbeTable,
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<(), ReportError> {
    let subset = table
        .subset
        .iter()
        .map(|j| j.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let mut sink = Sink::create(path.as_ref())?;
    match format {
        OutputFormat::Csv => {
            sink.line(&format!("# subset={subset}"))?;
            sink.line(&format!("# population_criterion={}", table.population_criterion))?;
            sink.line(&format!("# replications={}", table.replications))?;
            sink.csv_rows(&table.rows)
        }
        OutputFormat::JsonLines => {
            sink.json(&json!({
                "record": "meta",
                "subset": table.subset,
                "population_criterion": table.population_criterion,
                "replications": table.replications,
            }))?;
            for r in &table.rows {
                sink.json(r)?;
            }
            sink.finish()
        }
    }
}
