//! Plain-text matrix files: a `rows cols` header line followed by `rows`
//! lines of `cols` whitespace-separated reals.

use std::fmt::Write as _;
use std::path::Path;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: hline + 1,
            msg: format!("expected `rows cols`, found {header:?}"),
        });
    }
    let parse_dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::Parse {
                line: hline + 1,
                msg: format!("invalid dimension {s:?}"),
            }),
        }
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (lno, line) = lines.next().ok_or(Error::Parse {
            line: hline + 2 + r,
            msg: format!("expected {rows} data rows, found {r}"),
        })?;
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lno + 1,
                msg: format!("invalid number {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lno + 1,
                    msg: format!("non-finite value {tok:?}"),
                });
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Parse {
                line: lno + 1,
                msg: format!("expected {cols} values, found {}", data.len() - before),
            });
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err(Error::Parse {
            line: lno + 1,
            msg: "trailing data after the last row".into(),
        });
    }
    DenseMatrix::from_row_major(rows, cols, data)
}

/// Formats with shortest round-trip representation of each entry.
pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    std::fs::write(path, format_matrix(m))?;
    Ok(())
}
