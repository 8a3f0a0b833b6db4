//! End-to-end verification of a reduction `T⁻¹AT = C` that deliberately
//! avoids the library's own products, solvers and adjoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64};
use crate::pattern::{in_mask, Pattern};
use crate::product::{ProductKind, ScalarProduct};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub product: ProductKind,
    pub pattern: Pattern,
    /// `tol · max(1, ‖A‖_F)`
    pub threshold: f64,
    /// `‖TᴴBT − B‖_F`
    pub structure: f64,
    /// `‖T⁻¹AT − C‖_F`
    pub similarity: f64,
    /// Largest entry of `C` outside the pattern.
    pub pattern_residual: f64,
    /// Selfadjoint, skewadjoint, unitary, normal verdicts for `A` and `C`.
    pub classes_before: [bool; 4],
    pub classes_after: [bool; 4],
    pub structure_ok: bool,
    pub similarity_ok: bool,
    pub pattern_ok: bool,
    pub classes_ok: bool,
    pub pass: bool,
}

type Dense = Vec<Vec<C64>>;

fn to_dense(a: &Matrix) -> Dense {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)]).collect())
        .collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut c = vec![vec![C64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            for j in 0..m {
                c[i][j] += x * b[l][j];
            }
        }
    }
    c
}

fn conj_transpose(a: &Dense) -> Dense {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    (0..m)
        .map(|j| (0..n).map(|i| a[i][j].conj()).collect())
        .collect()
}

fn fro_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

fn fro(a: &Dense) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The form matrix written out entry by entry.
fn form(kind: ProductKind, n: usize) -> Dense {
    let mut b = vec![vec![C64::new(0.0, 0.0); n]; n];
    match kind {
        ProductKind::Perplectic => {
            for i in 0..n {
                b[i][n - 1 - i] = C64::new(1.0, 0.0);
            }
        }
        ProductKind::Symplectic => {
            let m = n / 2;
            for i in 0..m {
                b[i][i + m] = C64::new(1.0, 0.0);
                b[i + m][i] = C64::new(-1.0, 0.0);
            }
        }
    }
    b
}

/// Solves `X·rhs` with Gaussian elimination and complete pivoting.
fn solve(a: &Dense, rhs: &Dense) -> Result<Dense> {
    let n = a.len();
    let m = if n == 0 { 0 } else { rhs[0].len() };
    let mut w: Dense = a.clone();
    let mut r: Dense = rhs.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let scale = fro(a).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                if w[i][j].norm() > best {
                    best = w[i][j].norm();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= f64::EPSILON * scale * 1e-3 {
            return Err(Error::Singular);
        }
        w.swap(k, pi);
        r.swap(k, pi);
        for row in w.iter_mut() {
            row.swap(k, pj);
        }
        col_perm.swap(k, pj);
        for i in k + 1..n {
            let f = w[i][k] / w[k][k];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let t = w[k][j];
                w[i][j] -= f * t;
            }
            for j in 0..m {
                let t = r[k][j];
                r[i][j] -= f * t;
            }
        }
    }
    let mut y = vec![vec![C64::new(0.0, 0.0); m]; n];
    for i in (0..n).rev() {
        for j in 0..m {
            let mut s = r[i][j];
            for l in i + 1..n {
                s -= w[i][l] * y[l][j];
            }
            y[i][j] = s / w[i][i];
        }
    }
    let mut x = vec![vec![C64::new(0.0, 0.0); m]; n];
    for (k, &c) in col_perm.iter().enumerate() {
        x[c] = y[k].clone();
    }
    Ok(x)
}

/// Four class residuals of `A` judged at `tol · max(1, ‖A‖_F)`.
fn classes(a: &Dense, kind: ProductKind, tol: f64) -> [bool; 4] {
    let n = a.len();
    let b = form(kind, n);
    let ah = conj_transpose(a);
    // B⁻¹ = Bᴴ for both forms
    let star = mul(&mul(&conj_transpose(&b), &ah), &b);
    let thr = tol * fro(a).max(1.0);
    let neg: Dense = star
        .iter()
        .map(|r| r.iter().map(|z| -z).collect())
        .collect();
    let unit = mul(&mul(&ah, &b), a);
    [
        fro_diff(a, &star) <= thr,
        fro_diff(a, &neg) <= thr,
        fro_diff(&unit, &b) <= thr,
        fro_diff(&mul(a, &star), &mul(&star, a)) <= thr,
    ]
}

/// Independent check that `T` preserves the form of `B`, that `T⁻¹AT = C`,
/// that `C` has the pattern and that the four class verdicts agree.
pub fn oracle_verify_reduction(
    a: &Matrix,
    t: &Matrix,
    c: &Matrix,
    b: &ScalarProduct,
    pattern: Pattern,
    tol: f64,
) -> Result<VerifyReport> {
    let n = b.dim();
    for (name, m) in [("A", a), ("T", t), ("C", c)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {}x{}, expected {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    if pattern == Pattern::FourDiagonal && !n.is_multiple_of(2) {
        return Err(Error::OddSize(n));
    }
    let (ad, td, cd) = (to_dense(a), to_dense(t), to_dense(c));
    let bd = form(b.kind(), n);
    let threshold = tol * fro(&ad).max(1.0);

    let structure = fro_diff(&mul(&mul(&conj_transpose(&td), &bd), &td), &bd);
    let similarity = match solve(&td, &mul(&ad, &td)) {
        Ok(x) => fro_diff(&x, &cd),
        Err(_) => f64::INFINITY,
    };
    let pattern_residual = if pattern == Pattern::Bisymmetric {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst
                    .max((cd[i][j] - cd[j][i]).norm())
                    .max((cd[i][j] - cd[n - 1 - j][n - 1 - i]).norm())
                    .max(cd[i][j].im.abs());
            }
        }
        worst
    } else {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if !in_mask(pattern, n, i, j) {
                    worst = worst.max(cd[i][j].norm());
                }
            }
        }
        worst
    };
    let classes_before = classes(&ad, b.kind(), tol);
    let classes_after = classes(&cd, b.kind(), tol);

    let structure_ok = structure <= threshold;
    let similarity_ok = similarity <= threshold;
    let pattern_ok = pattern_residual <= threshold;
    let classes_ok = classes_before == classes_after;
    Ok(VerifyReport {
        product: b.kind(),
        pattern,
        threshold,
        structure,
        similarity,
        pattern_residual,
        classes_before,
        classes_after,
        structure_ok,
        similarity_ok,
        pattern_ok,
        classes_ok,
        pass: structure_ok && similarity_ok && pattern_ok && classes_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    #[test]
    fn identity_reduction_of_diagonal_passes() {
        let a = Matrix::from_diag(&[c64(1.0, 1.0), c64(2.0, 0.0), c64(3.0, -1.0)]);
        let id = Matrix::identity(3);
        let r = oracle_verify_reduction(
            &a,
            &id,
            &a,
            &ScalarProduct::perplectic(3),
            Pattern::XForm,
            1e-8,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn bumped_transform_fails_structure() {
        let a = Matrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        let mut t = Matrix::identity(2);
        t[(0, 1)] += c64(1e-2, 0.0);
        let c = t.similarity(&a).unwrap();
        let r = oracle_verify_reduction(
            &a,
            &t,
            &c,
            &ScalarProduct::perplectic(2),
            Pattern::XForm,
            1e-8,
        )
        .unwrap();
        assert!(!r.structure_ok && !r.pass);
    }

    #[test]
    fn complete_pivoting_solve() {
        let a = to_dense(&Matrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 1.0]]));
        let rhs = to_dense(&Matrix::from_real_rows(&[&[4.0], &[5.0]]));
        let x = solve(&a, &rhs).unwrap();
        assert!(
            (x[0][0] - c64(1.0, 0.0)).norm() < 1e-15 && (x[1][0] - c64(2.0, 0.0)).norm() < 1e-15
        );
    }
}
