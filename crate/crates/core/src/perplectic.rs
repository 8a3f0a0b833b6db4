//! Perplectic reductions: peeling non-real eigenvalue pairs, bisymmetric
//! X-form of commuting real-spectrum pairs, and the X-form of R-normal matrices.

use std::collections::BTreeMap;

use crate::eigen::{
    diagonalizability_of, eig_nondefective, inertia_congruence, joint_eigenspaces,
    EigenDecomposition, HermitianKind, DEFAULT_CLUSTER_TOL, DEFAULT_COND_CAP, DEFAULT_DROP_TOL,
};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64, I};
use crate::pattern::{off_pattern_max, project, Pattern};
use crate::product::{
    inverse_star, normality_residual, perplectic_sum, reverse_identity, selfadjoint_residual,
    unitarity_residual, z_matrix, ScalarProduct, DEFAULT_TOL,
};

/// `P⁻¹AP = (D ⊕ D⋆) ⊡ Â`.
#[derive(Debug, Clone)]
pub struct PeelResult {
    pub p: Matrix,
    /// Diagonal `m×m` block carrying the eigenvalues with positive imaginary part.
    pub d: Matrix,
    pub a_hat: Matrix,
    /// Sizes of the eigenvalue groups along `d`, in order.
    pub block_sizes: Vec<usize>,
    /// 1-norm condition number of the pairing matrix inverted on the way.
    pub pairing_condition: f64,
}

impl PeelResult {
    pub fn m(&self) -> usize {
        self.d.rows()
    }
}

/// Simultaneous peel of a commuting pair; both share the same `s`.
#[derive(Debug, Clone)]
pub struct PeelPairResult {
    pub p: Matrix,
    pub d_a: Matrix,
    pub d_b: Matrix,
    pub a_hat: Matrix,
    pub b_hat: Matrix,
}

impl PeelPairResult {
    pub fn s(&self) -> usize {
        self.d_a.rows()
    }
}

#[derive(Debug, Clone)]
pub struct RealPairResult {
    pub p: Matrix,
    pub x_a: Matrix,
    pub x_b: Matrix,
}

#[derive(Debug, Clone)]
pub struct XFormResult {
    pub p: Matrix,
    /// `P⁻¹AP` with off-pattern rounding noise removed.
    pub x: Matrix,
    /// Size of the diagonal corner blocks split off before the real part.
    pub peeled: usize,
    /// Named Frobenius residuals of the individual stages.
    pub residuals: BTreeMap<String, f64>,
    /// `tol · max(1, ‖A‖_F)`.
    pub threshold: f64,
    /// Every residual is at most ten times the threshold.
    pub ok: bool,
}

/// `S = (A + A⋆)/2`, `K = (i/2)(A − A⋆)` with respect to `R_n`; `A = S − iK`.
pub fn split_self_skew(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = a.square_dim()?;
    let star = ScalarProduct::perplectic(n).adjoint(a)?;
    let s = (a + &star).scale_real(0.5);
    let k = (a - &star).scale(I * 0.5);
    Ok((s, k))
}

fn require_perhermitian(a: &Matrix, tol: f64) -> Result<()> {
    let n = a.square_dim()?;
    let residual = selfadjoint_residual(a, &ScalarProduct::perplectic(n))?;
    let threshold = tol * a.norm_fro().max(1.0);
    if residual > threshold {
        return Err(Error::NotStructured {
            expected: "per-Hermitian",
            residual,
            threshold,
        });
    }
    Ok(())
}

fn require_commuting(a: &Matrix, b: &Matrix, tol: f64) -> Result<()> {
    let residual = (a * b - b * a).norm_fro();
    let threshold = tol * a.norm_fro().max(1.0) * b.norm_fro().max(1.0);
    if residual > threshold {
        return Err(Error::NotCommuting {
            residual,
            threshold,
        });
    }
    Ok(())
}

/// Columns `M` with `MᴴRM = diag(+I_{⌈k/2⌉}, −I_{⌊k/2⌋})`, built from
/// mutually `R`-orthogonal subspace bases.
fn signature_frame(bases: &[Matrix], r: &Matrix) -> Result<Matrix> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for v in bases {
        let gram = &(&v.h() * r) * v;
        let gram = (&gram + &gram.h()).scale_real(0.5);
        let ic = inertia_congruence(&gram, HermitianKind::Hermitian)?;
        let w = v * &ic.q;
        for j in 0..ic.n_plus {
            plus.push(w.column(j));
        }
        for j in ic.n_plus..w.cols() {
            minus.push(w.column(j));
        }
    }
    let k = plus.len() + minus.len();
    if plus.len() != k.div_ceil(2) {
        return Err(Error::InertiaMismatch {
            expected_plus: k.div_ceil(2),
            expected_minus: k / 2,
            plus: plus.len(),
            minus: minus.len(),
        });
    }
    let mut m = Matrix::zeros(r.rows(), k);
    for (j, col) in plus.iter().chain(minus.iter()).enumerate() {
        m.set_column(j, col);
    }
    Ok(m)
}

/// Cluster indices split into upper-half-plane clusters paired with their
/// conjugates, and the real clusters.
fn pair_clusters(e: &EigenDecomposition) -> Result<(Vec<(usize, usize)>, Vec<usize>)> {
    let thr = e.cluster_threshold;
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut real = Vec::new();
    for (c, cl) in e.clusters.iter().enumerate() {
        if cl.value.im > thr {
            upper.push(c);
        } else if cl.value.im < -thr {
            lower.push(c);
        } else {
            real.push(c);
        }
    }
    let mut used = vec![false; lower.len()];
    let mut pairs = Vec::new();
    for &u in &upper {
        let target = e.clusters[u].value.conj();
        let best = (0..lower.len()).filter(|&l| !used[l]).min_by(|&x, &y| {
            let dx = (e.clusters[lower[x]].value - target).norm();
            let dy = (e.clusters[lower[y]].value - target).norm();
            dx.total_cmp(&dy)
        });
        let mismatch = || Error::ConjugatePairMismatch {
            value: format!("{}", e.clusters[u].value),
        };
        let l = best.ok_or_else(mismatch)?;
        if e.clusters[lower[l]].multiplicity != e.clusters[u].multiplicity {
            return Err(mismatch());
        }
        used[l] = true;
        pairs.push((u, lower[l]));
    }
    if let Some(l) = (0..lower.len()).find(|&l| !used[l]) {
        return Err(Error::ConjugatePairMismatch {
            value: format!("{}", e.clusters[lower[l]].value),
        });
    }
    Ok((pairs, real))
}

fn peel_core(a: &Matrix) -> Result<PeelResult> {
    let n = a.square_dim()?;
    let e = eig_nondefective(a, DEFAULT_CLUSTER_TOL)?;
    let (pairs, real) = pair_clusters(&e)?;
    let r = reverse_identity(n);
    let xs: Vec<Matrix> = pairs.iter().map(|&(u, _)| e.cluster_basis(u)).collect();
    let ys: Vec<Matrix> = pairs.iter().map(|&(_, l)| e.cluster_basis(l)).collect();
    let block_sizes: Vec<usize> = xs.iter().map(|x| x.cols()).collect();
    let m: usize = block_sizes.iter().sum();

    let mut pairing = Matrix::zeros(m, m);
    let mut off = 0;
    for (x, y) in xs.iter().zip(&ys) {
        pairing.set_block(off, off, &(&(&x.h() * &r) * y));
        off += x.cols();
    }
    let (lower_frame, pairing_condition) = if m == 0 {
        (Matrix::zeros(n, 0), 1.0)
    } else {
        let inv = pairing.inverse()?;
        let cond = pairing.norm_one() * inv.norm_one();
        let y_refs: Vec<&Matrix> = ys.iter().collect();
        (
            &(&Matrix::hcat(&y_refs) * &inv) * &reverse_identity(m),
            cond,
        )
    };

    let k = n - 2 * m;
    let middle = if k == 0 {
        Matrix::zeros(n, 0)
    } else {
        let bases: Vec<Matrix> = real.iter().map(|&c| e.cluster_basis(c)).collect();
        &signature_frame(&bases, &r)? * &z_matrix(k)
    };

    let mut parts: Vec<&Matrix> = xs.iter().collect();
    parts.push(&middle);
    parts.push(&lower_frame);
    let p = Matrix::hcat(&parts);
    let t = p.similarity(a)?;
    let d = Matrix::from_diag(&t.block(0, m, 0, m).diag());
    Ok(PeelResult {
        a_hat: t.block(m, n - m, m, n - m),
        d,
        p,
        block_sizes,
        pairing_condition,
    })
}

/// Perplectic `P` moving the non-real eigenvalues of a diagonalizable
/// per-Hermitian matrix into diagonal corner blocks.
pub fn peel_nonreal(a: &Matrix) -> Result<PeelResult> {
    peel_nonreal_with_tol(a, DEFAULT_TOL)
}

pub fn peel_nonreal_with_tol(a: &Matrix, tol: f64) -> Result<PeelResult> {
    require_perhermitian(a, tol)?;
    peel_core(a)
}

/// Block-diagonal matrix of eigenvector bases of the diagonal blocks of `m`.
fn diagonalize_blocks(m: &Matrix, sizes: &[usize]) -> Result<Matrix> {
    let mut w = Matrix::zeros(m.rows(), m.cols());
    let mut off = 0;
    for &sz in sizes {
        let blk = m.block(off, off + sz, off, off + sz);
        let e = eig_nondefective(&blk, DEFAULT_CLUSTER_TOL)?;
        w.set_block(off, off, &e.vectors);
        off += sz;
    }
    Ok(w)
}

/// `(W ⊕ W^{-⋆}) ⊡ I_k`.
fn lift_blocks(w: &Matrix, k: usize) -> Result<Matrix> {
    perplectic_sum(&w.direct_sum(&inverse_star(w)?), &Matrix::identity(k))
}

fn peel_pair_core(a: &Matrix, b: &Matrix) -> Result<PeelPairResult> {
    let n = a.square_dim()?;
    let first = peel_core(a)?;
    let m = first.m();
    let k = n - 2 * m;
    let b1 = first.p.similarity(b)?;
    let q = lift_blocks(
        &diagonalize_blocks(&b1.block(0, m, 0, m), &first.block_sizes)?,
        k,
    )?;
    let p2 = &first.p * &q;

    let a2 = p2.similarity(a)?;
    let b2 = p2.similarity(b)?;
    let a_mid = a2.block(m, n - m, m, n - m);
    let b_mid = b2.block(m, n - m, m, n - m);
    let second = peel_core(&b_mid)?;
    let r = second.m();
    let a_mid2 = second.p.similarity(&a_mid)?;
    let w = lift_blocks(
        &diagonalize_blocks(&a_mid2.block(0, r, 0, r), &second.block_sizes)?,
        k - 2 * r,
    )?;
    let p2_inner = &second.p * &w;
    let p = &p2 * &perplectic_sum(&Matrix::identity(2 * m), &p2_inner)?;

    let ta = p.similarity(a)?;
    let tb = p.similarity(b)?;
    let s = m + r;
    Ok(PeelPairResult {
        d_a: Matrix::from_diag(&ta.block(0, s, 0, s).diag()),
        d_b: Matrix::from_diag(&tb.block(0, s, 0, s).diag()),
        a_hat: ta.block(s, n - s, s, n - s),
        b_hat: tb.block(s, n - s, s, n - s),
        p,
    })
}

/// One perplectic `P` peeling the non-real eigenvalues of both matrices of a
/// commuting per-Hermitian pair.
pub fn peel_nonreal_pair(a: &Matrix, b: &Matrix) -> Result<PeelPairResult> {
    peel_nonreal_pair_with_tol(a, b, DEFAULT_TOL)
}

pub fn peel_nonreal_pair_with_tol(a: &Matrix, b: &Matrix, tol: f64) -> Result<PeelPairResult> {
    require_same_order(a, b)?;
    require_perhermitian(a, tol)?;
    require_perhermitian(b, tol)?;
    require_commuting(a, b, tol)?;
    peel_pair_core(a, b)
}

fn require_same_order(a: &Matrix, b: &Matrix) -> Result<()> {
    let n = a.square_dim()?;
    if b.square_dim()? != n {
        return Err(Error::DimensionMismatch(format!(
            "orders {n} and {}",
            b.rows()
        )));
    }
    Ok(())
}

fn real_pair_core(a: &Matrix, b: &Matrix, tol: f64) -> Result<RealPairResult> {
    let n = a.square_dim()?;
    if n == 0 {
        return Ok(RealPairResult {
            p: Matrix::zeros(0, 0),
            x_a: Matrix::zeros(0, 0),
            x_b: Matrix::zeros(0, 0),
        });
    }
    let groups = joint_eigenspaces(a, b, tol, DEFAULT_CLUSTER_TOL)?;
    let max_imag = groups
        .iter()
        .map(|g| g.a_value.im.abs().max(g.b_value.im.abs()))
        .fold(0.0, f64::max);
    let limit = DEFAULT_CLUSTER_TOL * a.norm_fro().max(b.norm_fro()).max(1.0);
    if max_imag > limit {
        return Err(Error::NonRealSpectrum { max_imag });
    }
    let bases: Vec<Matrix> = groups.into_iter().map(|g| g.basis).collect();
    let p = &signature_frame(&bases, &reverse_identity(n))? * &z_matrix(n);
    Ok(RealPairResult {
        x_a: p.similarity(a)?,
        x_b: p.similarity(b)?,
        p,
    })
}

/// Perplectic `P` bringing a commuting per-Hermitian real-spectrum pair to
/// real bisymmetric X-form simultaneously.
pub fn real_pair_to_x(a: &Matrix, b: &Matrix) -> Result<RealPairResult> {
    real_pair_to_x_with_tol(a, b, DEFAULT_TOL)
}

pub fn real_pair_to_x_with_tol(a: &Matrix, b: &Matrix, tol: f64) -> Result<RealPairResult> {
    require_same_order(a, b)?;
    require_perhermitian(a, tol)?;
    require_perhermitian(b, tol)?;
    require_commuting(a, b, tol)?;
    real_pair_core(a, b, tol)
}

/// Perplectic reduction of a diagonalizable `R_n`-normal matrix to X-form.
pub fn normal_to_x(a: &Matrix) -> Result<XFormResult> {
    normal_to_x_with_tol(a, DEFAULT_TOL)
}

pub fn normal_to_x_with_tol(a: &Matrix, tol: f64) -> Result<XFormResult> {
    let n = a.square_dim()?;
    if !a.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let product = ScalarProduct::perplectic(n);
    let norm_a = a.norm_fro();
    let threshold = tol * norm_a.max(1.0);
    let normality = normality_residual(a, &product)?;
    if normality > threshold {
        return Err(Error::NotNormal {
            residual: normality,
            threshold,
        });
    }
    let ea = eig_nondefective(a, DEFAULT_CLUSTER_TOL)?;
    let diag = diagonalizability_of(a, &ea, DEFAULT_COND_CAP, DEFAULT_DROP_TOL);

    let (s, k) = split_self_skew(a)?;
    let mut residuals = BTreeMap::new();
    residuals.insert("normality".to_string(), normality);
    residuals.insert(
        "eigenpairs".to_string(),
        diag.max_residual * norm_a.max(1.0),
    );
    residuals.insert(
        "split_commutator".to_string(),
        (&s * &k - &k * &s).norm_fro(),
    );

    let peeled = peel_pair_core(&s, &k)?;
    let sz = peeled.s();
    let inner = real_pair_core(&peeled.a_hat, &peeled.b_hat, 10.0 * tol)?;
    residuals.insert(
        "peel_perplecticity".to_string(),
        unitarity_residual(&peeled.p, &product)?,
    );
    residuals.insert(
        "real_pair_perplecticity".to_string(),
        unitarity_residual(&inner.p, &ScalarProduct::perplectic(n - 2 * sz))?,
    );

    let p = &peeled.p * &perplectic_sum(&Matrix::identity(2 * sz), &inner.p)?;
    let full = p.similarity(a)?;
    let off = off_pattern_max(&full, Pattern::XForm)?;
    let x = project(&full, Pattern::XForm)?;
    let similarity = (&p * &x - a * &p).norm_fro();
    residuals.insert(
        "perplecticity".to_string(),
        unitarity_residual(&p, &product)?,
    );
    residuals.insert("off_pattern".to_string(), off);
    residuals.insert("similarity".to_string(), similarity);
    let ok = residuals
        .values()
        .all(|&v| v.is_finite() && v <= 10.0 * threshold.max(tol));
    Ok(XFormResult {
        p,
        x,
        peeled: sz,
        residuals,
        threshold,
        ok,
    })
}

/// Eigenvalues of an X-form matrix from its 2×2 (and central 1×1) blocks.
pub fn x_form_eigenvalues(x: &Matrix) -> Result<Vec<C64>> {
    let n = x.square_dim()?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n / 2 {
        let j = n - 1 - k;
        let (a, b, c, d) = (x[(k, k)], x[(k, j)], x[(j, k)], x[(j, j)]);
        let half = (a - d) * 0.5;
        let disc = (half * half + b * c).sqrt();
        let mean = (a + d) * 0.5;
        out.push(mean + disc);
        out.push(mean - disc);
    }
    if n % 2 == 1 {
        out.push(x[(n / 2, n / 2)]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;
    use crate::product::classify;

    fn perplectic_residual(p: &Matrix) -> f64 {
        unitarity_residual(p, &ScalarProduct::perplectic(p.rows())).unwrap()
    }

    #[test]
    fn split_examples() {
        let h = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 1.0]]);
        let (s, k) = split_self_skew(&h).unwrap();
        assert!(s.dist(&h) < 1e-15 && k.norm_fro() < 1e-15);
        let ir = reverse_identity(3).scale(I);
        let (s, k) = split_self_skew(&ir).unwrap();
        // (iR)⋆ = -iR, so K = -R
        assert!(s.norm_fro() < 1e-15 && k.dist(&-&reverse_identity(3)) < 1e-15);
    }

    #[test]
    fn peel_diagonal_conjugate_pair() {
        let a = Matrix::from_diag(&[I, -I]);
        let r = peel_nonreal(&a).unwrap();
        assert_eq!(r.m(), 1);
        assert!((r.d[(0, 0)] - I).norm() < 1e-14);
        assert_eq!(r.a_hat.rows(), 0);
        assert!(perplectic_residual(&r.p) < 1e-14);
    }

    #[test]
    fn peel_real_spectrum_keeps_everything_in_the_middle() {
        let a = Matrix::from_real_rows(&[&[2.0, 1.0], &[0.5, 2.0]]);
        let r = peel_nonreal(&a).unwrap();
        assert_eq!(r.m(), 0);
        assert_eq!(r.a_hat.rows(), 2);
        assert!(perplectic_residual(&r.p) < 1e-13);
        assert!((&r.p * &r.a_hat).dist(&(&a * &r.p)) < 1e-13);
    }

    #[test]
    fn real_pair_sign_case_lands_on_r2() {
        let r2 = reverse_identity(2);
        let res = real_pair_to_x(&r2, &Matrix::identity(2)).unwrap();
        assert!(perplectic_residual(&res.p) < 1e-14);
        assert!(res.x_b.dist(&Matrix::identity(2)) < 1e-14);
        assert!(res.x_a.dist(&r2) < 1e-14);
    }

    #[test]
    fn real_pair_rejects_non_perhermitian() {
        let a = Matrix::from_diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        assert!(matches!(
            real_pair_to_x(&a, &Matrix::identity(2)),
            Err(Error::NotStructured { .. })
        ));
    }

    #[test]
    fn normal_to_x_on_diagonal_and_rejections() {
        let d = Matrix::from_diag(&[c64(1.0, 2.0), c64(3.0, 0.0), c64(1.0, -2.0)]);
        let res = normal_to_x(&d).unwrap();
        assert!(res.ok, "{:?}", res.residuals);
        assert_eq!(off_pattern_max(&res.x, Pattern::XForm).unwrap(), 0.0);
        let not_normal = Matrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]);
        assert!(matches!(
            normal_to_x(&not_normal),
            Err(Error::NotNormal { .. })
        ));
        let jordan = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(normal_to_x(&jordan), Err(Error::Defective(_))));
    }

    #[test]
    fn normal_to_x_preserves_class() {
        let a = Matrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 1.0], &[0.0, -1.0, 0.0]]);
        let prod = ScalarProduct::perplectic(3);
        let before = classify(&a, &prod, 1e-10).unwrap();
        let res = normal_to_x(&a).unwrap();
        let after = classify(&res.x, &prod, 1e-8).unwrap();
        assert_eq!(before.flags(), after.flags());
    }
}
