//! Sparsity patterns of the canonical forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// Diagonal and anti-diagonal.
    XForm,
    /// Four diagonal `m×m` blocks of a `2m×2m` matrix.
    FourDiagonal,
    Diagonal,
    /// Real, symmetric and persymmetric.
    Bisymmetric,
}

impl std::str::FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" | "xform" | "x-form" => Ok(Pattern::XForm),
            "fourdiag" | "four-diagonal" | "fourdiagonal" => Ok(Pattern::FourDiagonal),
            "diag" | "diagonal" => Ok(Pattern::Diagonal),
            "bisymmetric" => Ok(Pattern::Bisymmetric),
            other => Err(Error::InvalidArgument(format!("unknown pattern `{other}`"))),
        }
    }
}

/// Whether `(i, j)` is on the support mask of a mask pattern of order `n`.
/// `Bisymmetric` has no mask and always returns true.
pub fn in_mask(pattern: Pattern, n: usize, i: usize, j: usize) -> bool {
    match pattern {
        Pattern::XForm => i == j || i + j + 1 == n,
        Pattern::FourDiagonal => {
            let m = n / 2;
            m == 0 || i % m == j % m
        }
        Pattern::Diagonal => i == j,
        Pattern::Bisymmetric => true,
    }
}

fn check_order(a: &Matrix, pattern: Pattern) -> Result<usize> {
    let n = a.square_dim()?;
    if pattern == Pattern::FourDiagonal && n % 2 != 0 {
        return Err(Error::OddSize(n));
    }
    Ok(n)
}

/// Largest absolute entry outside the mask; for `Bisymmetric` the largest of
/// the three bisymmetry residuals in max-abs norm.
pub fn off_pattern_max(a: &Matrix, pattern: Pattern) -> Result<f64> {
    let n = check_order(a, pattern)?;
    if pattern == Pattern::Bisymmetric {
        let b = bisymmetry_residuals(a)?;
        return Ok(b.symmetric.max(b.persymmetric).max(b.imaginary));
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if !in_mask(pattern, n, i, j) {
                worst = worst.max(a[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// Zeroes every entry outside the mask.
pub fn project(a: &Matrix, pattern: Pattern) -> Result<Matrix> {
    let n = check_order(a, pattern)?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        if in_mask(pattern, n, i, j) {
            a[(i, j)]
        } else {
            ZERO
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bisymmetry {
    /// `max |A − Aᵀ|`
    pub symmetric: f64,
    /// `max |A − R Aᵀ R|`
    pub persymmetric: f64,
    /// `max |Im A|`
    pub imaginary: f64,
}

pub fn bisymmetry_residuals(a: &Matrix) -> Result<Bisymmetry> {
    let n = a.square_dim()?;
    let mut out = Bisymmetry {
        symmetric: 0.0,
        persymmetric: 0.0,
        imaginary: 0.0,
    };
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            out.symmetric = out.symmetric.max((z - a[(j, i)]).norm());
            out.persymmetric = out.persymmetric.max((z - a[(n - 1 - j, n - 1 - i)]).norm());
            out.imaginary = out.imaginary.max(z.im.abs());
        }
    }
    Ok(out)
}
