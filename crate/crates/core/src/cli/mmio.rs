//! Dense Matrix Market files (`array` format), column-major on disk.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::matrix::{c64, Matrix};

pub const BANNER: &str = "%%MatrixMarket matrix array complex general";

#[derive(Debug, Error)]
pub enum MmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> MmError {
    MmError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

/// Parses the text of an array file. `real` and `integer` fields are widened
/// to complex; `general` is the only accepted symmetry.
pub fn parse_matrix(text: &str) -> Result<Matrix, MmError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = banner
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("bad banner `{banner}`")));
    }
    if tokens[2] != "array" {
        return Err(MmError::UnsupportedFormat(format!(
            "`{}` storage (only dense `array` is read)",
            tokens[2]
        )));
    }
    let field = match tokens[3].as_str() {
        "complex" => Field::Complex,
        "real" | "integer" => Field::Real,
        other => return Err(MmError::UnsupportedFormat(format!("field `{other}`"))),
    };
    if tokens[4] != "general" {
        return Err(MmError::UnsupportedFormat(format!(
            "symmetry `{}`",
            tokens[4]
        )));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| parse_err(size_line, format!("bad size line: {e}")))?;
    if dims.len() != 2 {
        return Err(parse_err(size_line, "size line must hold `rows cols`"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| parse_err(size_line, "size overflows"))?;

    let mut data = vec![c64(0.0, 0.0); count];
    let mut k = 0;
    let mut last_line = size_line;
    for (line, l) in body {
        last_line = line;
        if k == count {
            return Err(parse_err(line, "more entries than rows*cols"));
        }
        let vals: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(line, format!("bad number: {e}")))?;
        let z = match (field, vals.as_slice()) {
            (Field::Complex, [re, im]) => c64(*re, *im),
            (Field::Real, [re]) => c64(*re, 0.0),
            (Field::Complex, _) => return Err(parse_err(line, "expected `re im`")),
            (Field::Real, _) => return Err(parse_err(line, "expected one value")),
        };
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(parse_err(line, "non-finite entry"));
        }
        // column-major on disk
        let (i, j) = (k % rows.max(1), k / rows.max(1));
        data[i * cols + j] = z;
        k += 1;
    }
    if k != count {
        return Err(parse_err(
            last_line,
            format!("expected {count} entries, found {k}"),
        ));
    }
    Matrix::new(rows, cols, data).map_err(|e| parse_err(size_line, e.to_string()))
}

/// Text of an array complex general file with 17 significant digits.
pub fn format_matrix(a: &Matrix) -> String {
    let mut s = String::with_capacity(48 * a.rows() * a.cols() + 64);
    let _ = writeln!(s, "{BANNER}");
    let _ = writeln!(s, "{} {}", a.rows(), a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let z = a[(i, j)];
            let _ = writeln!(s, "{:.16e} {:.16e}", z.re, z.im);
        }
    }
    s
}

pub fn read_matrix(path: &Path) -> Result<Matrix, MmError> {
    let text = std::fs::read_to_string(path).map_err(|source| MmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(&text)
}

pub fn write_matrix(path: &Path, a: &Matrix) -> Result<(), MmError> {
    std::fs::write(path, format_matrix(a)).map_err(|source| MmError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_round_trip() {
        let a = Matrix::identity(3);
        assert_eq!(parse_matrix(&format_matrix(&a)).unwrap(), a);
    }

    #[test]
    fn column_major_order() {
        let text = format!("{BANNER}\n% note\n2 3\n1 0\n2 0\n3 0\n4 0\n5 0\n6 0\n");
        let a = parse_matrix(&text).unwrap();
        assert_eq!(a[(1, 0)], c64(2.0, 0.0));
        assert_eq!(a[(0, 1)], c64(3.0, 0.0));
        assert_eq!(a[(1, 2)], c64(6.0, 0.0));
    }

    #[test]
    fn real_field_is_widened() {
        let a = parse_matrix("%%MatrixMarket matrix array real general\n1 2\n1.5\n-2\n").unwrap();
        assert_eq!(a[(0, 1)], c64(-2.0, 0.0));
    }

    #[test]
    fn rejections() {
        match parse_matrix("%%MatrixMarket matrx array complex general\n1 1\n0 0\n") {
            Err(MmError::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_matrix("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 0 0\n"),
            Err(MmError::UnsupportedFormat(_))
        ));
        match parse_matrix(&format!("{BANNER}\n2 1\n1 0\nx 0\n")) {
            Err(MmError::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_matrix(&format!("{BANNER}\n2 1\n1 0\n")).is_err());
    }
}
