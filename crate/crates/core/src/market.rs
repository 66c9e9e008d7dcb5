//! Matrix Market I/O.
//!
//! Coordinate format (`%%MatrixMarket matrix coordinate real general`)
//! for matrices and array format for dense right-hand-side vectors, as
//! distributed alongside collection matrices. Indices are 1-based on
//! disk and 0-based in memory; duplicate coordinate entries are summed.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vector::DenseVector;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
}

fn parse_header(line: &str, lineno: usize) -> Result<Header> {
    let mut parts = line.split_whitespace();
    let err = |msg: &str| Error::Parse {
        line: lineno,
        msg: msg.to_string(),
    };
    if parts.next() != Some("%%MatrixMarket") {
        return Err(err("header must start with %%MatrixMarket"));
    }
    if parts.next() != Some("matrix") {
        return Err(err("expected object `matrix`"));
    }
    let layout = match parts.next() {
        Some("coordinate") => Layout::Coordinate,
        Some("array") => Layout::Array,
        other => {
            return Err(err(&format!(
                "unsupported layout {:?} (expected coordinate or array)",
                other.unwrap_or("<missing>")
            )))
        }
    };
    match parts.next() {
        Some("real") | Some("integer") => {}
        other => {
            return Err(err(&format!(
                "unsupported field {:?} (expected real or integer)",
                other.unwrap_or("<missing>")
            )))
        }
    }
    match parts.next() {
        Some("general") => {}
        other => {
            return Err(err(&format!(
                "unsupported symmetry {:?} (expected general)",
                other.unwrap_or("<missing>")
            )))
        }
    }
    Ok(Header { layout })
}

fn parse_usize(tok: Option<&str>, lineno: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Parse {
        line: lineno,
        msg: format!("missing {what}"),
    })?
    .parse()
    .map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("cannot parse {what}"),
    })
}

fn parse_f64(tok: Option<&str>, lineno: usize, what: &str) -> Result<f64> {
    tok.ok_or_else(|| Error::Parse {
        line: lineno,
        msg: format!("missing {what}"),
    })?
    .parse()
    .map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("cannot parse {what}"),
    })
}

/// Lines of a Matrix Market body: skips `%` comments and blank lines,
/// yielding (1-based line number, content).
fn data_lines(
    reader: impl BufRead,
) -> impl Iterator<Item = std::io::Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(idx, line)| {
        let lineno = idx + 1;
        match line {
            Ok(l) => {
                let t = l.trim();
                if t.is_empty() || t.starts_with('%') {
                    None
                } else {
                    Some(Ok((lineno, t.to_string())))
                }
            }
            Err(e) => Some(Err(e)),
        }
    })
}

/// Load a coordinate-format matrix.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let file = File::open(path.as_ref())?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let header = parse_header(first.trim(), 1)?;
    if header.layout != Layout::Coordinate {
        return Err(Error::Parse {
            line: 1,
            msg: "expected coordinate layout for a sparse matrix".into(),
        });
    }

    let mut lines = data_lines(reader);
    let (size_lineno, size_line) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing size line".into(),
        })?;
    let mut toks = size_line.split_whitespace();
    let rows = parse_usize(toks.next(), size_lineno + 1, "row count")?;
    let cols = parse_usize(toks.next(), size_lineno + 1, "column count")?;
    let nnz = parse_usize(toks.next(), size_lineno + 1, "nonzero count")?;

    let mut triplets = Vec::with_capacity(nnz);
    for item in lines {
        let (lineno, line) = item?;
        let lineno = lineno + 1; // header consumed before the line counter
        let mut toks = line.split_whitespace();
        let i = parse_usize(toks.next(), lineno, "row index")?;
        let j = parse_usize(toks.next(), lineno, "column index")?;
        let v = parse_f64(toks.next(), lineno, "value")?;
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("index ({i}, {j}) out of range for {rows} x {cols}"),
            });
        }
        triplets.push((i - 1, j - 1, v));
    }
    if triplets.len() != nnz {
        return Err(Error::Parse {
            line: size_lineno + 1,
            msg: format!("size line promises {nnz} entries, file has {}", triplets.len()),
        });
    }
    SparseMatrix::from_triplets(rows, cols, &triplets)
}

/// Load an array-format m x 1 vector (the convention used for bundled
/// right-hand sides, stored as `<matrix>_b.mtx`).
pub fn load_vector_market(path: impl AsRef<Path>) -> Result<DenseVector> {
    let file = File::open(path.as_ref())?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let header = parse_header(first.trim(), 1)?;
    if header.layout != Layout::Array {
        return Err(Error::Parse {
            line: 1,
            msg: "expected array layout for a dense vector".into(),
        });
    }

    let mut lines = data_lines(reader);
    let (size_lineno, size_line) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing size line".into(),
        })?;
    let mut toks = size_line.split_whitespace();
    let rows = parse_usize(toks.next(), size_lineno + 1, "row count")?;
    let cols = parse_usize(toks.next(), size_lineno + 1, "column count")?;
    if cols != 1 {
        return Err(Error::Parse {
            line: size_lineno + 1,
            msg: format!("expected a single column, got {cols}"),
        });
    }
    let mut values = Vec::with_capacity(rows);
    for item in lines {
        let (lineno, line) = item?;
        values.push(parse_f64(Some(line.as_str()), lineno + 1, "value")?);
    }
    if values.len() != rows {
        return Err(Error::Parse {
            line: size_lineno + 1,
            msg: format!("size line promises {rows} entries, file has {}", values.len()),
        });
    }
    DenseVector::new(values)
}

/// Write a matrix in coordinate format with round-trip-safe floats.
pub fn write_matrix_market(
    path: impl AsRef<Path>,
    a: &SparseMatrix,
    comments: &[&str],
) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    for c in comments {
        writeln!(w, "% {c}")?;
    }
    writeln!(w, "{} {} {}", a.rows(), a.cols(), a.nnz())?;
    for i in 0..a.rows() {
        for (j, v) in a.row(i) {
            writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write a vector in array format.
pub fn write_vector_market(
    path: impl AsRef<Path>,
    v: &DenseVector,
    comments: &[&str],
) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    for c in comments {
        writeln!(w, "% {c}")?;
    }
    writeln!(w, "{} 1", v.len())?;
    for x in v.as_slice() {
        writeln!(w, "{x:.16e}")?;
    }
    w.flush()?;
    Ok(())
}
