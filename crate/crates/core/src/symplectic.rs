//! The symplectic side, handled by conjugation with `U` into the perplectic
//! world and back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pattern::{off_pattern_max, project, Pattern};
use crate::perplectic::normal_to_x_with_tol;
use crate::product::{u_matrix, unitarity_residual, ScalarProduct, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `A ↦ UAUᴴ`
    Forward,
    /// `A ↦ UᴴAU`
    Backward,
}

#[derive(Debug, Clone)]
pub struct FourDiagResult {
    /// Symplectic transform with `S⁻¹AS = D4`.
    pub s: Matrix,
    pub d4: Matrix,
    pub peeled: usize,
    pub residuals: BTreeMap<String, f64>,
    pub threshold: f64,
    pub ok: bool,
}

pub fn to_perplectic_frame(a: &Matrix, direction: Direction) -> Result<Matrix> {
    let n = a.square_dim()?;
    let u = u_matrix(n)?;
    Ok(match direction {
        Direction::Forward => &(&u * a) * &u.h(),
        Direction::Backward => &(&u.h() * a) * &u,
    })
}

/// Symplectic reduction of a diagonalizable `J`-normal matrix to
/// four-diagonal form.
pub fn normal_to_four_diagonal(a: &Matrix) -> Result<FourDiagResult> {
    normal_to_four_diagonal_with_tol(a, DEFAULT_TOL)
}

pub fn normal_to_four_diagonal_with_tol(a: &Matrix, tol: f64) -> Result<FourDiagResult> {
    let n = a.square_dim()?;
    if n % 2 != 0 {
        return Err(Error::OddSize(n));
    }
    let inner = normal_to_x_with_tol(&to_perplectic_frame(a, Direction::Forward)?, tol)?;
    let s = to_perplectic_frame(&inner.p, Direction::Backward)?;
    let full = s.similarity(a)?;
    let off = off_pattern_max(&full, Pattern::FourDiagonal)?;
    let d4 = project(&full, Pattern::FourDiagonal)?;

    let threshold = tol * a.norm_fro().max(1.0);
    let mut residuals = inner.residuals;
    residuals.insert("off_pattern".to_string(), off);
    residuals.insert(
        "symplecticity".to_string(),
        unitarity_residual(&s, &ScalarProduct::symplectic(n)?)?,
    );
    residuals.insert("similarity".to_string(), (&s * &d4 - a * &s).norm_fro());
    let ok = residuals
        .values()
        .all(|&v| v.is_finite() && v <= 10.0 * threshold.max(tol));
    Ok(FourDiagResult {
        s,
        d4,
        peeled: inner.peeled,
        residuals,
        threshold,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, I};
    use crate::product::{reverse_identity, symplectic_unit};

    #[test]
    fn j_maps_to_i_r() {
        for n in [2, 4, 6] {
            let f = to_perplectic_frame(&symplectic_unit(n), Direction::Forward).unwrap();
            assert!(f.dist(&reverse_identity(n).scale(I)) < 1e-15);
        }
    }

    #[test]
    fn round_trip_and_identity() {
        let a = Matrix::from_fn(4, 4, |i, j| c64(i as f64 - 0.5 * j as f64, (i * j) as f64));
        let b = to_perplectic_frame(
            &to_perplectic_frame(&a, Direction::Forward).unwrap(),
            Direction::Backward,
        )
        .unwrap();
        assert!(b.dist(&a) < 1e-14);
        let id = Matrix::identity(4);
        assert_eq!(to_perplectic_frame(&id, Direction::Backward).unwrap(), id);
        assert!(matches!(
            to_perplectic_frame(&Matrix::identity(3), Direction::Forward),
            Err(Error::OddSize(3))
        ));
    }

    #[test]
    fn diagonal_and_j2_inputs() {
        let d = Matrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 0.0), c64(-1.0, 0.0), c64(-2.0, 0.0)]);
        let r = normal_to_four_diagonal(&d).unwrap();
        assert!(r.ok, "{:?}", r.residuals);
        let r = normal_to_four_diagonal(&symplectic_unit(2)).unwrap();
        assert!(r.ok, "{:?}", r.residuals);
        assert!(matches!(
            normal_to_four_diagonal(&Matrix::identity(3)),
            Err(Error::OddSize(3))
        ));
    }
}
