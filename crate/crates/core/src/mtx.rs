//! Matrix Market I/O for sparse matrices (`coordinate real general`).

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads a coordinate real general matrix. Indices are 1-based on disk;
/// duplicate entries are summed and explicit zeros dropped.
pub fn read_mtx<R: Read>(reader: R) -> Result<SparseMatrix> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix header"));
    }
    if fields[2] != "coordinate" || fields[3] != "real" || fields[4] != "general" {
        return Err(parse_err(
            1,
            format!("unsupported format '{} {} {}'", fields[2], fields[3], fields[4]),
        ));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(lineno, "size line needs rows, cols and nnz"));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(lineno, format!("bad integer '{s}'")))
                };
                let dims = (parse(toks[0])?, parse(toks[1])?, parse(toks[2])?);
                triplets.reserve(dims.2);
                size = Some(dims);
            }
            Some((rows, cols, _)) => {
                if toks.len() != 3 {
                    return Err(parse_err(lineno, "entry needs row, col and value"));
                }
                let index = |s: &str, bound: usize| -> Result<usize> {
                    let v = s
                        .parse::<usize>()
                        .map_err(|_| parse_err(lineno, format!("bad index '{s}'")))?;
                    if v == 0 || v > bound {
                        return Err(parse_err(lineno, format!("index {v} outside 1..={bound}")));
                    }
                    Ok(v - 1)
                };
                let i = index(toks[0], rows)?;
                let j = index(toks[1], cols)?;
                let v = toks[2]
                    .parse::<f64>()
                    .map_err(|_| parse_err(lineno, format!("bad value '{}'", toks[2])))?;
                if !v.is_finite() {
                    return Err(parse_err(lineno, "non-finite value"));
                }
                triplets.push((i, j, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(parse_err(
            0,
            format!("size line declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    SparseMatrix::from_triplets(rows, cols, &triplets)
}

pub fn read_mtx_file(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    read_mtx(std::fs::File::open(path)?)
}

/// Writes `a` in column-major entry order with 1-based indices and
/// shortest round-trip float formatting.
pub fn write_mtx<W: Write>(a: &SparseMatrix, writer: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(writer);
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for (j, col) in a.columns().enumerate() {
        for (&i, &v) in col.row_indices.iter().zip(col.values) {
            writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_mtx_file(a: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_mtx(a, std::fs::File::create(path)?)
}
