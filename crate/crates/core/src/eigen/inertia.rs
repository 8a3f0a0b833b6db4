//! Congruence of a nonsingular (skew-)Hermitian matrix to its inertia form.

use serde::{Deserialize, Serialize};

use super::schur::{default_max_iter, schur};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64, I};
use crate::product::DEFAULT_TOL;

/// Eigenvalues below this relative size make the input singular.
const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HermitianKind {
    Hermitian,
    SkewHermitian,
}

/// `QᴴAQ = diag(+I, −I)` for Hermitian `A`, or `i·diag(+I, −I)` for
/// skew-Hermitian `A`.
#[derive(Debug, Clone)]
pub struct InertiaCongruence {
    pub q: Matrix,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl InertiaCongruence {
    /// The target `diag(+I_{n+}, −I_{n−})` (times `i` in the skew case).
    pub fn signature_matrix(&self, kind: HermitianKind) -> Matrix {
        let unit = match kind {
            HermitianKind::Hermitian => C64::new(1.0, 0.0),
            HermitianKind::SkewHermitian => I,
        };
        let d: Vec<C64> = (0..self.n_plus + self.n_minus)
            .map(|k| if k < self.n_plus { unit } else { -unit })
            .collect();
        Matrix::from_diag(&d)
    }
}

pub fn inertia_congruence(a: &Matrix, kind: HermitianKind) -> Result<InertiaCongruence> {
    inertia_congruence_with_tol(a, kind, DEFAULT_TOL)
}

/// As [`inertia_congruence`] with an explicit Hermitian-residual tolerance,
/// relative to `max(1, ‖A‖_F)`.
pub fn inertia_congruence_with_tol(
    a: &Matrix,
    kind: HermitianKind,
    tol: f64,
) -> Result<InertiaCongruence> {
    let n = a.square_dim()?;
    let scale = a.norm_fro().max(1.0);
    let h = match kind {
        HermitianKind::Hermitian => a.clone(),
        HermitianKind::SkewHermitian => a.scale(-I),
    };
    let residual = (&h - &h.h()).norm_fro();
    if residual > tol * scale {
        return Err(Error::NotHermitian { residual });
    }
    let sym = (&h + &h.h()).scale_real(0.5);
    let s = schur(&sym, default_max_iter(n))?;
    let lambda: Vec<f64> = s.t.diag().iter().map(|z| z.re).collect();
    if lambda.iter().any(|l| l.abs() <= SINGULAR_RTOL * scale) {
        return Err(Error::Singular);
    }
    let mut order: Vec<usize> = (0..n).filter(|&k| lambda[k] > 0.0).collect();
    let n_plus = order.len();
    order.extend((0..n).filter(|&k| lambda[k] < 0.0));
    let mut q = s.q.select_columns(&order);
    for (j, &k) in order.iter().enumerate() {
        let f = 1.0 / lambda[k].abs().sqrt();
        let col: Vec<C64> = q.column(j).iter().map(|z| z * f).collect();
        q.set_column(j, &col);
    }
    Ok(InertiaCongruence {
        q,
        n_plus,
        n_minus: n - n_plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;
    use crate::product::reverse_identity;

    #[test]
    fn scaling_case() {
        let a = Matrix::from_real_rows(&[&[4.0, 0.0], &[0.0, -9.0]]);
        let r = inertia_congruence(&a, HermitianKind::Hermitian).unwrap();
        assert_eq!((r.n_plus, r.n_minus), (1, 1));
        let expected = Matrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 1.0 / 3.0]]);
        assert!(r.q.dist(&expected) < 1e-15);
    }

    #[test]
    fn reverse_identity_inertia() {
        for n in 1..=12 {
            let r = reverse_identity(n);
            let c = inertia_congruence(&r, HermitianKind::Hermitian).unwrap();
            assert_eq!((c.n_plus, c.n_minus), (n.div_ceil(2), n / 2));
            let qrq = &(&c.q.h() * &r) * &c.q;
            assert!(qrq.dist(&c.signature_matrix(HermitianKind::Hermitian)) < 1e-12);
        }
    }

    #[test]
    fn skew_case_uses_imaginary_signature() {
        let a = Matrix::from_diag(&[c64(0.0, 2.0), c64(0.0, -3.0), c64(0.0, 5.0)]);
        let c = inertia_congruence(&a, HermitianKind::SkewHermitian).unwrap();
        assert_eq!((c.n_plus, c.n_minus), (2, 1));
        let qaq = &(&c.q.h() * &a) * &c.q;
        assert!(qaq.dist(&c.signature_matrix(HermitianKind::SkewHermitian)) < 1e-14);
    }

    #[test]
    fn errors() {
        let singular = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(
            inertia_congruence(&singular, HermitianKind::Hermitian).unwrap_err(),
            Error::Singular
        );
        let not_h = Matrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            inertia_congruence(&not_h, HermitianKind::Hermitian),
            Err(Error::NotHermitian { .. })
        ));
    }
}
