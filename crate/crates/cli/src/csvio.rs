// SPDX-License-Identifier: MIT OR Apache-2.0

//! Numeric CSV input and output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mxpbf::DataMatrix;

use crate::error::{CliError, CliResult};

/// Reads a rectangular numeric CSV with rows as observations. A first row
/// containing any non-numeric field is treated as a header and skipped.
pub fn load_csv(path: &Path) -> CliResult<DataMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Format {
            path: path.into(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::NonRectangular {
                path: path.into(),
                line,
                expected,
                got: record.len(),
            });
        }
        for (field, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| CliError::Parse {
                path: path.into(),
                line,
                field: field + 1,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(CliError::NonFinite {
                    path: path.into(),
                    line,
                    field: field + 1,
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    let p = width.unwrap_or(0);
    DataMatrix::new(rows, p, values).map_err(|e| CliError::Format {
        path: path.into(),
        message: e.to_string(),
    })
}

/// Writes a matrix with a header `x1,...,xp`.
pub fn write_csv(path: &Path, data: &DataMatrix) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let header: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).collect();
    let to_err = |e: csv::Error| CliError::Format {
        path: path.into(),
        message: e.to_string(),
    };
    w.write_record(&header).map_err(to_err)?;
    for row in data.rows() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(to_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Two-column `center,log_mxpbf` profile.
pub fn write_profile(path: &Path, rows: &[(usize, f64)]) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut body = String::from("center,log_mxpbf\n");
    for (center, v) in rows {
        body.push_str(&format!("{center},{v}\n"));
    }
    w.write_all(body.as_bytes()).map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file_with(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_is_detected() {
        let f = file_with("a,b\n1,2\n3,4\n5,6\n");
        let d = load_csv(f.path()).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        let f = file_with("1,2\n3,4\n5,6\n");
        assert_eq!(load_csv(f.path()).unwrap().n(), 3);
    }

    #[test]
    fn ragged_row_is_named() {
        let f = file_with("1,2\n3,4,5\n6,7\n");
        match load_csv(f.path()).unwrap_err() {
            CliError::NonRectangular {
                line, expected, got, ..
            } => {
                assert_eq!((line, expected, got), (2, 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_cells_are_located() {
        let f = file_with("x,y\n1,2\n3,NaN\n");
        match load_csv(f.path()).unwrap_err() {
            CliError::NonFinite { line, field, .. } => assert_eq!((line, field), (3, 2)),
            other => panic!("unexpected {other:?}"),
        }
        let f = file_with("1,2\n3,abc\n");
        match load_csv(f.path()).unwrap_err() {
            CliError::Parse { line, field, value, .. } => {
                assert_eq!((line, field, value.as_str()), (2, 2, "abc"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let d = DataMatrix::from_rows(&[vec![0.1, -1e-300], vec![1.0 / 3.0, 12345.678]]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(f.path(), &d).unwrap();
        assert_eq!(load_csv(f.path()).unwrap(), d);
    }
}
