//! The perplectic and symplectic scalar products, their adjoint, the
//! perplectic sum, and the special matrices `R`, `J`, `Z`, `U`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c64, Matrix, I, ONE, ZERO};

/// Default relative residual tolerance; thresholds are `tol · max(1, ‖A‖_F)`.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Perplectic,
    Symplectic,
}

impl std::str::FromStr for ProductKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perplectic" | "R" | "r" => Ok(Self::Perplectic),
            "symplectic" | "J" | "j" => Ok(Self::Symplectic),
            other => Err(Error::InvalidArgument(format!(
                "unknown scalar product '{other}'"
            ))),
        }
    }
}

/// The indefinite scalar product `[x, y] = xᴴBy` with `B = R_n` or `B = J_2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScalarProduct {
    kind: ProductKind,
    dim: usize,
}

impl ScalarProduct {
    pub fn perplectic(n: usize) -> Self {
        Self {
            kind: ProductKind::Perplectic,
            dim: n,
        }
    }

    pub fn symplectic(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::OddSize(n));
        }
        Ok(Self {
            kind: ProductKind::Symplectic,
            dim: n,
        })
    }

    pub fn new(kind: ProductKind, n: usize) -> Result<Self> {
        match kind {
            ProductKind::Perplectic => Ok(Self::perplectic(n)),
            ProductKind::Symplectic => Self::symplectic(n),
        }
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The Gram matrix `B`.
    pub fn matrix(&self) -> Matrix {
        match self.kind {
            ProductKind::Perplectic => reverse_identity(self.dim),
            ProductKind::Symplectic => symplectic_unit(self.dim),
        }
    }

    /// Applies `B⁻¹` on the left using `R⁻¹ = R` and `J⁻¹ = -J`.
    fn apply_inverse_left(&self, m: &Matrix) -> Matrix {
        let n = self.dim;
        match self.kind {
            ProductKind::Perplectic => Matrix::from_fn(n, m.cols(), |i, j| m[(n - 1 - i, j)]),
            ProductKind::Symplectic => {
                let h = n / 2;
                // -J = [[0, -I], [I, 0]]
                Matrix::from_fn(n, m.cols(), |i, j| {
                    if i < h {
                        -m[(i + h, j)]
                    } else {
                        m[(i - h, j)]
                    }
                })
            }
        }
    }

    /// Applies `B` on the right.
    fn apply_right(&self, m: &Matrix) -> Matrix {
        let n = self.dim;
        match self.kind {
            ProductKind::Perplectic => Matrix::from_fn(m.rows(), n, |i, j| m[(i, n - 1 - j)]),
            ProductKind::Symplectic => {
                let h = n / 2;
                // (M J)[:, j] = -M[:, j+h] for j < h, M[:, j-h] otherwise
                Matrix::from_fn(m.rows(), n, |i, j| {
                    if j < h {
                        -m[(i, j + h)]
                    } else {
                        m[(i, j - h)]
                    }
                })
            }
        }
    }

    fn check(&self, a: &Matrix) -> Result<()> {
        let n = a.square_dim()?;
        if n != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix of order {n} with scalar product of order {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// The adjoint `A⋆ = B⁻¹AᴴB`.
    pub fn adjoint(&self, a: &Matrix) -> Result<Matrix> {
        self.check(a)?;
        Ok(self.apply_right(&self.apply_inverse_left(&a.h())))
    }
}

/// `adjoint_star(A, B) = B⁻¹AᴴB`.
pub fn adjoint_star(a: &Matrix, b: &ScalarProduct) -> Result<Matrix> {
    b.adjoint(a)
}

/// Anti-identity `R_n`.
pub fn reverse_identity(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if i + j + 1 == n { ONE } else { ZERO })
}

/// `J_n = [[0, I], [-I, 0]]` for even `n` (panics on odd `n`; use
/// [`build_special`] for a checked version).
pub fn symplectic_unit(n: usize) -> Matrix {
    assert!(n.is_multiple_of(2), "J needs even order");
    let h = n / 2;
    Matrix::from_fn(n, n, |i, j| {
        if i < h && j == i + h {
            ONE
        } else if i >= h && j + h == i {
            -ONE
        } else {
            ZERO
        }
    })
}

/// The orthogonal `Z = (1/√2)[[I, R], [-R, I]]`; for odd `n` returns `Z ⊡ [1]`.
pub fn z_matrix(n: usize) -> Matrix {
    let m = n / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let even = Matrix::from_fn(2 * m, 2 * m, |i, j| {
        let (bi, bj) = (i / m.max(1), j / m.max(1));
        let (li, lj) = (i % m.max(1), j % m.max(1));
        let diag = li == lj;
        let anti = li + lj + 1 == m;
        match (bi, bj) {
            (0, 0) | (1, 1) if diag => c64(s, 0.0),
            (0, 1) if anti => c64(s, 0.0),
            (1, 0) if anti => c64(-s, 0.0),
            _ => ZERO,
        }
    });
    if n.is_multiple_of(2) {
        even
    } else {
        perplectic_sum(&even, &Matrix::identity(1)).expect("even outer block")
    }
}

/// The unitary `U = diag(I_m, -i·R_m)` with `Uᴴ(iR_n)U = J_n`.
pub fn u_matrix(n: usize) -> Result<Matrix> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddSize(n));
    }
    let m = n / 2;
    let r = reverse_identity(m).scale(-I);
    Ok(Matrix::identity(m).direct_sum(&r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialKind {
    R,
    J,
    Z,
    U,
}

/// Exact special matrices of order `n`.
pub fn build_special(kind: SpecialKind, n: usize) -> Result<Matrix> {
    match kind {
        SpecialKind::R => Ok(reverse_identity(n)),
        SpecialKind::J => {
            if !n.is_multiple_of(2) {
                return Err(Error::OddSize(n));
            }
            Ok(symplectic_unit(n))
        }
        SpecialKind::Z => Ok(z_matrix(n)),
        SpecialKind::U => u_matrix(n),
    }
}

/// The perplectic sum `P ⊡ Q`: `Q` is nested in the center of the 2×2-block
/// partitioned `P`.
pub fn perplectic_sum(p: &Matrix, q: &Matrix) -> Result<Matrix> {
    let np = p.square_dim()?;
    let k = q.square_dim()?;
    if np % 2 != 0 {
        return Err(Error::OddSize(np));
    }
    let l = np / 2;
    let n = np + k;
    let mut out = Matrix::zeros(n, n);
    let map = |i: usize| if i < l { i } else { i + k };
    for i in 0..np {
        for j in 0..np {
            out[(map(i), map(j))] = p[(i, j)];
        }
    }
    out.set_block(l, l, q);
    Ok(out)
}

/// Left-associative n-ary perplectic sum `((P₁ ⊡ P₂) ⊡ P₃) ⊡ …`.
pub fn perplectic_sum_all(parts: &[Matrix]) -> Result<Matrix> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty perplectic sum".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, q| perplectic_sum(&acc, q))
}

/// Permutation `R` of order `2ℓ + k` with `R⁻¹(P ⊡ Q)R = P ⊕ Q`.
pub fn unshuffle_permutation(l: usize, k: usize) -> Matrix {
    let n = 2 * l + k;
    let target = |a: usize| {
        if a < l {
            a
        } else if a < 2 * l {
            a + k
        } else {
            a - l
        }
    };
    let mut r = Matrix::zeros(n, n);
    for a in 0..n {
        r[(target(a), a)] = ONE;
    }
    r
}

/// A single residual with its Frobenius value, a spectral-norm estimate and
/// the verdict against the report threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub frobenius: f64,
    pub spectral: f64,
    pub ok: bool,
}

impl Residual {
    fn of(m: &Matrix, threshold: f64) -> Self {
        let frobenius = m.norm_fro();
        Self {
            frobenius,
            spectral: m.norm_spectral(),
            ok: frobenius <= threshold,
        }
    }
}

/// Residuals of a matrix against the four structure classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub product: ProductKind,
    pub dim: usize,
    /// Norm used for the verdicts.
    pub norm: String,
    pub tol: f64,
    /// `tol · max(1, ‖A‖_F)`.
    pub threshold: f64,
    pub norm_a: f64,
    pub selfadjoint: Residual,
    pub skewadjoint: Residual,
    pub unitary: Residual,
    pub normal: Residual,
}

impl StructureReport {
    /// The four verdicts in the order selfadjoint, skewadjoint, unitary, normal.
    pub fn flags(&self) -> [bool; 4] {
        [
            self.selfadjoint.ok,
            self.skewadjoint.ok,
            self.unitary.ok,
            self.normal.ok,
        ]
    }
}

pub fn classify(a: &Matrix, b: &ScalarProduct, tol: f64) -> Result<StructureReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let star = b.adjoint(a)?;
    let norm_a = a.norm_fro();
    let threshold = tol * norm_a.max(1.0);
    let bm = b.matrix();
    let unitary = &(&a.h() * &bm) * a - bm;
    Ok(StructureReport {
        product: b.kind(),
        dim: b.dim(),
        norm: "frobenius".into(),
        tol,
        threshold,
        norm_a,
        selfadjoint: Residual::of(&(a - &star), threshold),
        skewadjoint: Residual::of(&(a + &star), threshold),
        unitary: Residual::of(&unitary, threshold),
        normal: Residual::of(&(a * &star - &star * a), threshold),
    })
}

/// Frobenius residual `‖AA⋆ − A⋆A‖`.
pub fn normality_residual(a: &Matrix, b: &ScalarProduct) -> Result<f64> {
    let star = b.adjoint(a)?;
    Ok((a * &star - &star * a).norm_fro())
}

/// Frobenius residual `‖A − A⋆‖`.
pub fn selfadjoint_residual(a: &Matrix, b: &ScalarProduct) -> Result<f64> {
    Ok((a - &b.adjoint(a)?).norm_fro())
}

/// Frobenius residual `‖TᴴBT − B‖`.
pub fn unitarity_residual(t: &Matrix, b: &ScalarProduct) -> Result<f64> {
    b.check(t)?;
    let bm = b.matrix();
    Ok((&(&t.h() * &bm) * t - bm).norm_fro())
}

/// `S^{-⋆} = R S^{-H} R` for the perplectic product of order `S.rows()`.
pub fn inverse_star(s: &Matrix) -> Result<Matrix> {
    let inv = s.inverse()?;
    ScalarProduct::perplectic(s.rows()).adjoint(&inv)
}
