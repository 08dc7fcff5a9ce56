//! Dense and sparse instance file formats.
//!
//! Dense: optional `#` comment lines, a header `m n`, then `m` lines of
//! exactly `n` characters from `{0,1}`.
//!
//! Sparse: header `m n`, then `m` lines `i: j1 j2 ...` with the 1-based,
//! strictly increasing column indices of the ones in row `i`. An empty row
//! is written `i:`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::BinaryMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    Dense,
    Sparse,
}

/// Parses either format; the first data line decides which.
pub fn parse_matrix(text: &str) -> Result<BinaryMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header line \"m n\""))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::parse(hline, format!("malformed header {header:?}, expected \"m n\"")));
    }
    let parse_dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::parse(hline, format!("invalid dimension {s:?}"))),
        }
    };
    let m = parse_dim(dims[0])?;
    let n = parse_dim(dims[1])?;
    let mut out = BinaryMatrix::zeros(m, n)?;

    let mut row = 0usize;
    let mut sparse: Option<bool> = None;
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        if row == m {
            return Err(Error::parse(lineno, format!("unexpected extra line; header declares {m} rows")));
        }
        let is_sparse = *sparse.get_or_insert_with(|| line.contains(':'));
        if is_sparse {
            parse_sparse_row(&mut out, row, lineno, line)?;
        } else {
            parse_dense_row(&mut out, row, lineno, line)?;
        }
        row += 1;
    }
    if row != m {
        return Err(Error::parse(last_line + 1, format!("expected {m} rows, found {row}")));
    }
    Ok(out)
}

fn parse_dense_row(out: &mut BinaryMatrix, row: usize, lineno: usize, line: &str) -> Result<()> {
    let n = out.cols();
    if line.len() != n {
        return Err(Error::parse(lineno, format!("row has {} characters, expected {n}", line.chars().count())));
    }
    for (j, ch) in line.bytes().enumerate() {
        match ch {
            b'1' => out.set(row, j),
            b'0' => {}
            _ => {
                let bad = line[j..].chars().next().unwrap_or('?');
                return Err(Error::parse(lineno, format!("invalid character {bad:?} at column {}", j + 1)));
            }
        }
    }
    Ok(())
}

fn parse_sparse_row(out: &mut BinaryMatrix, row: usize, lineno: usize, line: &str) -> Result<()> {
    let (idx, rest) = line
        .split_once(':')
        .ok_or_else(|| Error::parse(lineno, "sparse row must have the form \"i: j1 j2 ...\""))?;
    let idx: usize = idx
        .trim()
        .parse()
        .map_err(|_| Error::parse(lineno, format!("invalid row index {:?}", idx.trim())))?;
    if idx != row + 1 {
        return Err(Error::parse(lineno, format!("row index {idx} out of order, expected {}", row + 1)));
    }
    let n = out.cols();
    let mut prev = 0usize;
    for tok in rest.split_whitespace() {
        let j: usize = tok.parse().map_err(|_| Error::parse(lineno, format!("invalid column index {tok:?}")))?;
        if j == 0 || j > n {
            return Err(Error::parse(lineno, format!("column index {j} out of range 1..={n}")));
        }
        if j <= prev {
            return Err(Error::parse(lineno, format!("column indices must be strictly increasing ({prev} then {j})")));
        }
        prev = j;
        out.set(row, j - 1);
    }
    Ok(())
}

/// Canonical text form. Dense output is `m n`, then one `0`/`1` line per row,
/// each terminated by a newline.
pub fn serialize_matrix(matrix: &BinaryMatrix, format: MatrixFormat) -> String {
    let (m, n) = (matrix.rows(), matrix.cols());
    let mut out = String::with_capacity(8 + m * (n + 1));
    let _ = writeln!(out, "{m} {n}");
    for i in 0..m {
        match format {
            MatrixFormat::Dense => {
                out.extend((0..n).map(|j| if matrix.get(i, j) { '1' } else { '0' }));
            }
            MatrixFormat::Sparse => {
                let _ = write!(out, "{}:", i + 1);
                for j in matrix.row_support(i) {
                    let _ = write!(out, " {}", j + 1);
                }
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dense_and_sparse_examples() {
        let a = parse_matrix("2 3\n101\n010\n").unwrap();
        assert_eq!(a.row_support(0), vec![0, 2]);
        assert_eq!(a.row_support(1), vec![1]);
        let b = parse_matrix("2 3\n1: 1 3\n2: 2\n").unwrap();
        assert_eq!(a, b);
        let one = parse_matrix("1 1\n1\n").unwrap();
        assert_eq!(one, BinaryMatrix::ones(1, 1).unwrap());
    }

    #[test]
    fn serialize_examples() {
        let a = parse_matrix("2 3\n101\n010\n").unwrap();
        assert_eq!(serialize_matrix(&a, MatrixFormat::Dense), "2 3\n101\n010\n");
        assert_eq!(serialize_matrix(&a, MatrixFormat::Sparse), "2 3\n1: 1 3\n2: 2\n");
        let z = BinaryMatrix::zeros(1, 1).unwrap();
        assert_eq!(serialize_matrix(&z, MatrixFormat::Dense), "1 1\n0\n");
        assert_eq!(serialize_matrix(&z, MatrixFormat::Sparse), "1 1\n1:\n");
    }

    #[test]
    fn comments_and_empty_sparse_rows() {
        let a = parse_matrix("# instance\n# more\n2 2\n1: 2\n2:\n").unwrap();
        assert_eq!(a.row_support(0), vec![1]);
        assert_eq!(a.first_zero_row(), Some(1));
    }

    fn err_line(text: &str) -> usize {
        match parse_matrix(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(err_line(""), 1);
        assert_eq!(err_line("2\n"), 1);
        assert_eq!(err_line("x 3\n"), 1);
        assert_eq!(err_line("0 3\n"), 1);
        assert_eq!(err_line("2 3\n101\n01\n"), 3);
        assert_eq!(err_line("2 3\n101\n0a0\n"), 3);
        assert_eq!(err_line("2 3\n101\n"), 3);
        assert_eq!(err_line("1 3\n101\n111\n"), 3);
        assert_eq!(err_line("2 3\n1: 1 4\n2:\n"), 2);
        assert_eq!(err_line("2 3\n1: 2 1\n2:\n"), 2);
        assert_eq!(err_line("2 3\n1: 1\n3: 1\n"), 3);
        assert_eq!(err_line("2 3\n1: 0\n2:\n"), 2);
    }

    proptest! {
        #[test]
        fn round_trip_both_formats(seed in any::<u64>(), m in 1usize..20, n in 1usize..100, d in 0.0f64..=1.0) {
            let spec = crate::gen::GenSpec::constant_density(m, n, d, seed);
            let a = crate::gen::gen_constant_density(&spec).unwrap();
            for f in [MatrixFormat::Dense, MatrixFormat::Sparse] {
                let text = serialize_matrix(&a, f);
                prop_assert_eq!(&parse_matrix(&text).unwrap(), &a);
            }
        }
    }
}
