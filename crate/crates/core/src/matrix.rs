//! Dense complex matrices.
//!
//! [`Matrix`] is the value type every other module works with: row-major
//! storage of [`C64`] entries with plain value semantics. Only the handful of
//! kernels the reductions need live here (products, norms, LU, Householder
//! QR); the eigen-kernel is in [`crate::eigen`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Shorthand constructor for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| c64(rows[i][j], 0.0))
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    /// Returns the order of a square matrix, or `NotSquare`.
    pub fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn trace(&self) -> C64 {
        self.diag().into_iter().sum()
    }

    /// Conjugate transpose.
    pub fn h(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Transpose without conjugation.
    pub fn t(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Spectral norm estimate by power iteration on `AᴴA`.
    pub fn norm_spectral(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let ah = self.h();
        // deterministic, non-symmetric start vector
        let mut v: Vec<C64> = (0..self.cols)
            .map(|j| c64(1.0 + 0.1 * j as f64, 0.01 * j as f64))
            .collect();
        let mut sigma = 0.0;
        for _ in 0..200 {
            let nv = vec_norm(&v);
            if nv == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= nv);
            let w = ah.mul_vec(&self.mul_vec(&v));
            let next = vec_norm(&w).sqrt();
            v = w;
            if (next - sigma).abs() <= 1e-14 * next {
                sigma = next;
                break;
            }
            sigma = next;
        }
        sigma
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &z) in col.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Matrix made of the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(parts: &[&Matrix]) -> Self {
        let rows = parts.first().map_or(0, |p| p.rows);
        assert!(parts.iter().all(|p| p.rows == rows), "hcat row mismatch");
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// `self * other` with a dimension check.
    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.matmul(other))
    }

    fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let orow = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[p * m..(p + 1) * m];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Matrix {
            rows: n,
            cols: m,
            data: out,
        }
    }

    /// `self - other` in Frobenius norm; panics on shape mismatch.
    pub fn dist(&self, other: &Matrix) -> f64 {
        (self - other).norm_fro()
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.lu()?.inverse()
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        self.lu()?.solve(rhs)
    }

    /// Similarity `self⁻¹ · a · self` computed through an LU solve.
    pub fn similarity(&self, a: &Matrix) -> Result<Matrix> {
        self.solve(&(a * self))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        self.matmul(&rhs)
    }
}

impl Mul<&Matrix> for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Mul<Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        self.matmul(&rhs)
    }
}

fn zip_with(a: &Matrix, b: &Matrix, f: impl Fn(C64, C64) -> C64) -> Matrix {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "shape mismatch {}x{} vs {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        zip_with(&self, &rhs, |x, y| x + y)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        zip_with(&self, &rhs, |x, y| x - y)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.square_dim()?;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= f64::EPSILON * scale * 1e-4 || pmax == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.n;
        if rhs.rows != n {
            return Err(Error::DimensionMismatch(format!(
                "LU of order {n} cannot solve a system with {} rows",
                rhs.rows
            )));
        }
        let m = rhs.cols;
        let mut x = Matrix::from_fn(n, m, |i, j| rhs[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[i * n + k] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[i * n + k] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[i * n + i];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.n))
    }

    pub fn det(&self) -> C64 {
        let n = self.n;
        let mut d: C64 = (0..n).map(|i| self.lu[i * n + i]).product();
        // parity of the row permutation
        let mut seen = vec![false; n];
        let mut swaps = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k];
                len += 1;
            }
            swaps += len - 1;
        }
        if swaps % 2 == 1 {
            d = -d;
        }
        d
    }
}

/// Determinant by LU; returns zero for singular input.
pub fn det(a: &Matrix) -> Result<C64> {
    let n = a.square_dim()?;
    if n == 0 {
        return Ok(ONE);
    }
    match Lu::new(a) {
        Ok(lu) => Ok(lu.det()),
        Err(Error::Singular) => Ok(ZERO),
        Err(e) => Err(e),
    }
}

/// Householder QR with column pivoting. Returns the absolute diagonal of `R`
/// in pivot order; used to read off numerical rank.
pub fn pivoted_qr_diagonal(a: &Matrix) -> Vec<f64> {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut norms: Vec<f64> = (0..n).map(|j| vec_norm(&w.column(j)).powi(2)).collect();
    let mut diag = Vec::new();
    for k in 0..m.min(n) {
        let p = (k..n)
            .max_by(|&x, &y| norms[x].total_cmp(&norms[y]))
            .unwrap_or(k);
        if p != k {
            for i in 0..m {
                let t = w[(i, k)];
                w[(i, k)] = w[(i, p)];
                w[(i, p)] = t;
            }
            norms.swap(k, p);
        }
        let x: Vec<C64> = (k..m).map(|i| w[(i, k)]).collect();
        let alpha = vec_norm(&x);
        diag.push(alpha);
        if alpha == 0.0 {
            continue;
        }
        let v = householder_vector(&x);
        apply_householder_left(&mut w, &v, k, k);
        for (j, nj) in norms.iter_mut().enumerate().skip(k + 1) {
            *nj = (*nj - w[(k, j)].norm_sqr()).max(0.0);
        }
    }
    diag
}

/// Numerical rank: number of pivoted-QR diagonal entries above
/// `drop_tol · |R₀₀|`.
pub fn numerical_rank(a: &Matrix, drop_tol: f64) -> usize {
    let d = pivoted_qr_diagonal(a);
    let top = d.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    d.iter().filter(|&&x| x > drop_tol * top).count()
}

/// Orthonormal basis of the column span (thin Householder QR, no pivoting).
/// Assumes full column rank.
pub fn orthonormalize_columns(a: &Matrix) -> Matrix {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut vs = Vec::with_capacity(n);
    for k in 0..n.min(m) {
        let x: Vec<C64> = (k..m).map(|i| w[(i, k)]).collect();
        let v = householder_vector(&x);
        apply_householder_left(&mut w, &v, k, k);
        vs.push(v);
    }
    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I
    let mut q = Matrix::from_fn(m, n, |i, j| if i == j { ONE } else { ZERO });
    for k in (0..vs.len()).rev() {
        apply_householder_left(&mut q, &vs[k], k, 0);
    }
    q
}

/// Unit Householder vector `v` with `(I - 2vvᴴ)x = βe₁`.
pub(crate) fn householder_vector(x: &[C64]) -> Vec<C64> {
    let alpha = vec_norm(x);
    let mut v = x.to_vec();
    if alpha == 0.0 {
        return vec![ZERO; x.len()];
    }
    let phase = if x[0].norm() == 0.0 {
        ONE
    } else {
        x[0] / x[0].norm()
    };
    v[0] += phase * alpha;
    let nv = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    v
}

/// Applies `I - 2vvᴴ` to rows `r0..r0+len(v)` of `w`, columns `c0..`.
pub(crate) fn apply_householder_left(w: &mut Matrix, v: &[C64], r0: usize, c0: usize) {
    if v.iter().all(|z| *z == ZERO) {
        return;
    }
    for j in c0..w.cols {
        let s: C64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi.conj() * w[(r0 + i, j)])
            .sum();
        let s2 = s * 2.0;
        for (i, vi) in v.iter().enumerate() {
            w[(r0 + i, j)] -= vi * s2;
        }
    }
}

/// Applies `I - 2vvᴴ` from the right to columns `c0..c0+len(v)` of `w`, all rows.
pub(crate) fn apply_householder_right(w: &mut Matrix, v: &[C64], c0: usize) {
    if v.iter().all(|z| *z == ZERO) {
        return;
    }
    for i in 0..w.rows {
        let s: C64 = v
            .iter()
            .enumerate()
            .map(|(j, vj)| w[(i, c0 + j)] * vj)
            .sum();
        let s2 = s * 2.0;
        for (j, vj) in v.iter().enumerate() {
            w[(i, c0 + j)] -= s2 * vj.conj();
        }
    }
}
