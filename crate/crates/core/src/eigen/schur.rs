//! Complex Schur decomposition: Householder reduction to Hessenberg form
//! followed by implicitly shifted single-shift QR with deflation.

use crate::error::{Error, Result};
use crate::matrix::{
    apply_householder_left, apply_householder_right, c64, householder_vector, Matrix, C64, ZERO,
};

/// `A = Q T Qᴴ` with `T` upper triangular and `Q` unitary.
#[derive(Debug, Clone)]
pub struct SchurDecomposition {
    pub t: Matrix,
    pub q: Matrix,
    /// Number of QR sweeps performed.
    pub iterations: usize,
}

/// Iterations without deflation after which an exceptional shift is used.
const EXCEPTIONAL_EVERY: usize = 10;

/// Default iteration budget for a matrix of order `n`.
pub fn default_max_iter(n: usize) -> usize {
    30 * n.max(1)
}

pub fn schur(a: &Matrix, max_iter: usize) -> Result<SchurDecomposition> {
    let n = a.square_dim()?;
    if !a.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    if n <= 1 {
        return Ok(SchurDecomposition {
            t: h,
            q,
            iterations: 0,
        });
    }
    hessenberg_in_place(&mut h, &mut q);
    let iterations = qr_iterate(&mut h, &mut q, max_iter)?;
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(SchurDecomposition {
        t: h,
        q,
        iterations,
    })
}

/// Reduces `h` to upper Hessenberg form, accumulating the transform in `q`.
fn hessenberg_in_place(h: &mut Matrix, q: &mut Matrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        if x[1..].iter().all(|z| *z == ZERO) {
            continue;
        }
        let v = householder_vector(&x);
        apply_householder_left(h, &v, k + 1, 0);
        apply_householder_right(h, &v, k + 1);
        apply_householder_right(q, &v, k + 1);
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Plane rotation `G = [[c, s], [-s̄, c]]` with `G·[x; y] = [r; 0]`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn new(x: C64, y: C64) -> Self {
        let (ax, ay) = (x.norm(), y.norm());
        if ay == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Self {
                c: 0.0,
                s: y.conj() / ay,
            };
        }
        let rho = ax.hypot(ay);
        Self {
            c: ax / rho,
            s: (x / ax) * y.conj() / rho,
        }
    }

    /// Rows `k, k+1` ← `G · rows`, for columns `c0..`.
    fn apply_rows(&self, m: &mut Matrix, k: usize, c0: usize) {
        for j in c0..m.cols() {
            let (a, b) = (m[(k, j)], m[(k + 1, j)]);
            m[(k, j)] = a * self.c + self.s * b;
            m[(k + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Columns `k, k+1` ← `cols · Gᴴ`, for rows `0..r1`.
    fn apply_cols(&self, m: &mut Matrix, k: usize, r1: usize) {
        for i in 0..r1 {
            let (a, b) = (m[(i, k)], m[(i, k + 1)]);
            m[(i, k)] = a * self.c + self.s.conj() * b;
            m[(i, k + 1)] = -self.s * a + b * self.c;
        }
    }
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (l1, l2) = (mean + disc, mean - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_iterate(h: &mut Matrix, q: &mut Matrix, max_iter: usize) -> Result<usize> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let hnorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut total = 0;
    let mut stalled = 0;
    while hi > 0 {
        // look for a negligible subdiagonal entry in the active window
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if scale == 0.0 {
                scale = hnorm;
            }
            if sub <= eps * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stalled = 0;
            continue;
        }
        total += 1;
        stalled += 1;
        if total > max_iter {
            return Err(Error::NonConvergence { max_iter });
        }
        let shift = if stalled % EXCEPTIONAL_EVERY == 0 {
            let sub = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + c64(0.75 * sub, 0.25 * sub)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        // implicit single-shift bulge chase over lo..=hi
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let g = Givens::new(x, y);
            let c0 = if k == lo { lo } else { k - 1 };
            g.apply_rows(h, k, c0);
            g.apply_cols(h, k, (k + 3).min(hi + 1));
            g.apply_cols(q, k, n);
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::I;

    fn lcg_matrix(n: usize, seed: u64) -> Matrix {
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        Matrix::from_fn(n, n, |_, _| c64(next(), next()))
    }

    fn check(a: &Matrix, tol: f64) {
        let s = schur(a, default_max_iter(a.rows())).unwrap();
        let n = a.rows();
        let recon = &(&s.q * &s.t) * &s.q.h();
        assert!(
            recon.dist(a) <= tol * a.norm_fro().max(1.0),
            "reconstruction {}",
            recon.dist(a)
        );
        assert!((&s.q.h() * &s.q).dist(&Matrix::identity(n)) <= tol * (n as f64).max(1.0));
        for i in 0..n {
            for j in 0..i {
                assert_eq!(s.t[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn triangular_input_needs_no_iterations() {
        let a = Matrix::from_fn(4, 4, |i, j| {
            if j >= i {
                c64((i + j) as f64, 1.0)
            } else {
                ZERO
            }
        });
        let s = schur(&a, 120).unwrap();
        assert_eq!(s.iterations, 0);
        assert_eq!(s.t, a);
        assert_eq!(s.q, Matrix::identity(4));
    }

    #[test]
    fn rotation_generator_has_imaginary_spectrum() {
        let a = Matrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let s = schur(&a, 60).unwrap();
        let mut d = s.t.diag();
        d.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((d[0] + I).norm() < 1e-14 && (d[1] - I).norm() < 1e-14);
    }

    #[test]
    fn random_matrices_reconstruct() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (8, 4), (17, 5), (40, 6)] {
            check(&lcg_matrix(n, seed), 1e-12);
        }
    }

    #[test]
    fn hermitian_and_zero_inputs() {
        let b = lcg_matrix(6, 77);
        let h = &b + &b.h();
        check(&h, 1e-12);
        check(&Matrix::zeros(5, 5), 1e-12);
        check(&Matrix::identity(5), 1e-12);
    }

    #[test]
    fn permutation_matrix_converges() {
        // cyclic shift: eigenvalues are the 6th roots of unity
        let n = 6;
        let a = Matrix::from_fn(n, n, |i, j| {
            if j == (i + 1) % n {
                c64(1.0, 0.0)
            } else {
                ZERO
            }
        });
        check(&a, 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            schur(&Matrix::zeros(2, 3), 10),
            Err(Error::NotSquare { .. })
        ));
    }
}
