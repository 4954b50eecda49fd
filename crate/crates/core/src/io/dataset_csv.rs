use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::covariance::{CovError, Dataset};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dataset file contains no data rows")]
    Empty,

    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },

    #[error("invalid dataset: {0}")]
    Invalid(#[from] CovError),
}

/// Reads `p + q` comma-separated numeric columns per row, predictors first.
pub fn parse_dataset_csv(
    path: impl AsRef<Path>,
    p: usize,
    q: usize,
    has_header: bool,
) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_dataset_csv(file, p, q, has_header).map_err(|e| match e {
        DataError::Io { source, .. } => DataError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn read_dataset_csv<R: Read>(
    reader: R,
    p: usize,
    q: usize,
    has_header: bool,
) -> Result<Dataset, DataError> {
    let width = p + q;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|pos| pos.line()).unwrap_or(0);
            match e.into_kind() {
                csv::ErrorKind::Io(source) => DataError::Io {
                    path: PathBuf::new(),
                    source,
                },
                kind => DataError::Malformed {
                    line,
                    message: format!("{kind:?}"),
                },
            }
        })?;
        let line = record.position().map(|pos| pos.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != width {
            return Err(DataError::Malformed {
                line,
                message: format!("expected {width} fields (p = {p}, q = {q}), found {}", record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| DataError::Malformed {
                line,
                message: format!("field {} is not a number: `{field}`", col + 1),
            })?;
            if !v.is_finite() {
                return Err(DataError::Malformed {
                    line,
                    message: format!("field {} is not finite: `{field}`", col + 1),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(DataError::Empty);
    }
    let all = DMatrix::from_row_slice(rows, width, &values);
    let x = all.columns(0, p).into_owned();
    let y = all.columns(p, q).into_owned();
    Ok(Dataset::new(x, y)?)
}

/// Writes the dataset without a header, using shortest round-trip decimals.
pub fn write_dataset_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<(), DataError> {
    let path = path.as_ref();
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    for k in 0..data.n() {
        let row: Vec<String> = data
            .x()
            .row(k)
            .iter()
            .chain(data.y().row(k).iter())
            .map(|v| v.to_string())
            .collect();
        writeln!(out, "{}", row.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
