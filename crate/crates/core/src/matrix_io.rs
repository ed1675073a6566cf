//! Plain-text dense matrix files.
//!
//! A header line `rows cols`, then one row per line with whitespace-separated
//! values. Writing uses 17 significant digits so a write/read round trip is
//! exact. Blank lines and lines starting with `%` or `#` are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub fn write_matrix<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<DenseMatrix> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| match l {
        Ok(s) => {
            let t = s.trim();
            !(t.is_empty() || t.starts_with('%') || t.starts_with('#'))
        }
        Err(_) => true,
    });

    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    let header = header?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line,
            msg: format!("bad header: {e}"),
        })?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse {
            line,
            msg: format!("header needs `rows cols`, got {:?}", header.trim()),
        });
    };
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            line,
            msg: "dimensions must be positive".into(),
        });
    }

    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, text) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: format!("expected {rows} rows, file ended after {}", data.len() / cols),
        })?;
        let text = text?;
        let values: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        if values.len() != cols {
            return Err(Error::Parse {
                line,
                msg: format!("expected {cols} values, found {}", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                msg: "non-finite value".into(),
            });
        }
        data.extend(values);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            msg: "trailing data after last row".into(),
        });
    }
    Ok(DenseMatrix::from_row_slice(rows, cols, &data))
}

pub fn save(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_matrix(BufReader::new(f))
}
