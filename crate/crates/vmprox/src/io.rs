//! LIBSVM text format: `<label> <idx>:<val> ...` per line, 1-based indices
//! on disk, 0-based in memory. Gzip-compressed files are detected by their
//! magic bytes. Labels 0 and -1 map to -1, 1 and +1 to +1; anything else is
//! rejected, as are duplicate or non-increasing indices within a line.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;
use vmprox_core::dataset::{Dataset, DatasetError};

use crate::csvout::format_float;
use crate::DATA_DIR_ENV;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("empty input: no data lines")]
    Empty,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid dataset: {0}")]
    Dataset(DatasetError),
}

/// Parses LIBSVM text. `dim_override` fixes the feature dimension; without
/// it the dimension is the largest index seen. Row order follows line order.
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    dim_override: Option<usize>,
) -> Result<Dataset, ParseError> {
    let mut rows: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| ParseError::Io {
            path: PathBuf::from("<stream>"),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        rows.push(parse_line(trimmed, line_no)?);
    }
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    Dataset::from_rows(&rows, dim_override).map_err(|e| match e {
        DatasetError::IndexOutOfRange { row } => ParseError::Line {
            line: row + 1,
            msg: "feature index exceeds dimension override".to_string(),
        },
        other => ParseError::Dataset(other),
    })
}

fn parse_line(line: &str, line_no: usize) -> Result<(f64, Vec<(usize, f64)>), ParseError> {
    let err = |msg: String| ParseError::Line { line: line_no, msg };
    let mut tokens = line.split_whitespace();
    let label_tok = tokens.next().expect("nonempty line has a first token");
    let label_val: f64 = label_tok
        .parse()
        .map_err(|_| err(format!("non-numeric label '{label_tok}'")))?;
    let label = if label_val == 1.0 {
        1.0
    } else if label_val == -1.0 || label_val == 0.0 {
        -1.0
    } else {
        return Err(err(format!("label '{label_tok}' is not one of 0, +1, -1")));
    };
    let mut entries: Vec<(usize, f64)> = Vec::new();
    let mut prev_index = 0usize;
    for tok in tokens {
        let (idx_str, val_str) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("malformed feature '{tok}', expected idx:val")))?;
        let index: usize = idx_str
            .parse()
            .map_err(|_| err(format!("non-numeric feature index '{idx_str}'")))?;
        if index == 0 {
            return Err(err("feature indices are 1-based".to_string()));
        }
        if index <= prev_index {
            return Err(err(format!(
                "non-increasing feature index {index} after {prev_index}"
            )));
        }
        let value: f64 = val_str
            .parse()
            .map_err(|_| err(format!("non-numeric feature value '{val_str}'")))?;
        if !value.is_finite() {
            return Err(err(format!("non-finite feature value '{val_str}'")));
        }
        prev_index = index;
        entries.push((index - 1, value));
    }
    Ok((label, entries))
}

/// Opens a dataset file, transparently inflating gzip (magic bytes 1f 8b).
pub fn open_dataset(path: &Path, dim_override: Option<usize>) -> Result<Dataset, ParseError> {
    let mut file = File::open(path).map_err(|source| ParseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic).map_err(|source| ParseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file = File::open(path).map_err(|source| ParseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if got == 2 && magic == [0x1f, 0x8b] {
        parse_libsvm(
            BufReader::new(flate2::read::GzDecoder::new(file)),
            dim_override,
        )
    } else {
        parse_libsvm(BufReader::new(file), dim_override)
    }
}

/// Resolves a dataset path: used as given when it exists, otherwise joined
/// under `$VMPROX_DATA_DIR` when that is set.
pub fn resolve_dataset_path(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if path.is_relative() {
        if let Ok(root) = std::env::var(DATA_DIR_ENV) {
            let joined = Path::new(&root).join(path);
            if joined.exists() {
                return joined;
            }
        }
    }
    path.to_path_buf()
}

/// Writes a dataset back out in LIBSVM format (values printed with 17
/// significant digits so a reparse reproduces the dataset exactly).
pub fn write_libsvm<W: Write>(ds: &Dataset, mut w: W) -> std::io::Result<()> {
    for i in 0..ds.n() {
        let label = if ds.label(i) > 0.0 { "+1" } else { "-1" };
        write!(w, "{label}")?;
        let (cols, vals) = ds.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            write!(w, " {}:{}", c + 1, format_float(v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}
