//! Commuting witnesses with distinct eigenvalues, the discriminant, and
//! small structured perturbations to distinct eigenvalues.

use crate::eigen::{eig_default, min_gap, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::matrix::{c64, Matrix, C64, ONE, ZERO};
use crate::perplectic::{normal_to_x_with_tol, XFormResult};
use crate::product::{
    normality_residual, perplectic_sum_all, ProductKind, ScalarProduct, DEFAULT_TOL,
};
use crate::symplectic::{to_perplectic_frame, Direction};
use crate::testkit::{normal_c64, rng_for};
use rand::Rng;

/// Relative threshold for "distinct" eigenvalues.
pub const DEFAULT_GAP_TOL: f64 = 1e-6;
/// Largest order accepted by [`discriminant`].
pub const DISCRIMINANT_CAP: usize = 12;
/// Coefficient draws in [`perturb_to_distinct`].
pub const MAX_DRAWS: usize = 32;
const WITNESS_CANDIDATES: u64 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCertificate {
    pub a_hat: Matrix,
    pub distance_frobenius: f64,
    pub distance_spectral: f64,
    pub min_gap: f64,
    pub gap_threshold: f64,
    pub c0: C64,
    pub draws: usize,
    pub normality_residual: f64,
    pub witness_norm: f64,
}

/// Per-block data of an X-form matrix: the block and the eigenvalue pair it
/// carries (a single value for the centre of odd order).
struct XBlocks {
    n: usize,
    blocks: Vec<Matrix>,
}

impl XBlocks {
    fn of(x: &Matrix) -> Self {
        let n = x.rows();
        let mut blocks: Vec<Matrix> = (0..n / 2)
            .map(|k| {
                let j = n - 1 - k;
                Matrix::from_rows(&[vec![x[(k, k)], x[(k, j)]], vec![x[(j, k)], x[(j, j)]]])
            })
            .collect();
        if n % 2 == 1 {
            blocks.push(Matrix::from_diag(&[x[(n / 2, n / 2)]]));
        }
        Self { n, blocks }
    }
}

fn eig2(m: &Matrix) -> [C64; 2] {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    [mean + disc, mean - disc]
}

/// Block coefficients: `(α, β)` turns a block with distinct eigenvalues into
/// `αN + βI` and a scalar block into `diag(α, 1 + α)`.
#[derive(Debug, Clone, Copy)]
struct Coeff {
    alpha: C64,
    beta: C64,
}

/// `M'` together with its eigenvalues, block by block.
fn witness_blocks(xb: &XBlocks, coeffs: &[Coeff], scalar_tol: f64) -> (Matrix, Vec<(C64, C64)>) {
    let mut parts = Vec::with_capacity(xb.blocks.len());
    let mut pairs = Vec::with_capacity(xb.n);
    for (nk, cf) in xb.blocks.iter().zip(coeffs) {
        if nk.rows() == 1 {
            let mu = cf.alpha * nk[(0, 0)] + cf.beta;
            parts.push(Matrix::from_diag(&[mu]));
            pairs.push((nk[(0, 0)], mu));
            continue;
        }
        let [l1, l2] = eig2(nk);
        if (l1 - l2).norm() <= scalar_tol {
            let m = Matrix::from_diag(&[cf.alpha, ONE + cf.alpha]);
            pairs.push((nk[(0, 0)], cf.alpha));
            pairs.push((nk[(1, 1)], ONE + cf.alpha));
            parts.push(m);
        } else {
            parts.push(&nk.scale(cf.alpha) + &Matrix::identity(2).scale(cf.beta));
            pairs.push((l1, cf.alpha * l1 + cf.beta));
            pairs.push((l2, cf.alpha * l2 + cf.beta));
        }
    }
    let m = if parts.is_empty() {
        Matrix::zeros(0, 0)
    } else {
        perplectic_sum_all(&parts).expect("2x2 outer blocks")
    };
    (m, pairs)
}

fn random_coeffs(rng: &mut impl Rng, xb: &XBlocks, scalar_tol: f64) -> Vec<Coeff> {
    xb.blocks
        .iter()
        .map(|nk| {
            let spread = if nk.rows() == 2 {
                let [l1, l2] = eig2(nk);
                (l1 - l2).norm()
            } else {
                0.0
            };
            let alpha = if spread > scalar_tol {
                // unit eigenvalue spread inside the block
                normal_c64(rng) / spread
            } else {
                normal_c64(rng)
            };
            Coeff {
                alpha,
                beta: normal_c64(rng),
            }
        })
        .collect()
}

struct Witness {
    m: Matrix,
    /// `(eigenvalue of A, eigenvalue of M)` on a shared eigenvector.
    pairs: Vec<(C64, C64)>,
}

fn build_witness(red: &XFormResult, coeffs: &[Coeff], scalar_tol: f64) -> Result<Witness> {
    let xb = XBlocks::of(&red.x);
    let (mp, pairs) = witness_blocks(&xb, coeffs, scalar_tol);
    let m = &(&red.p * &mp) * &red.p.inverse()?;
    Ok(Witness { m, pairs })
}

fn min_gap_of(pairs: &[(C64, C64)]) -> f64 {
    let mus: Vec<C64> = pairs.iter().map(|p| p.1).collect();
    min_gap(&mus)
}

fn reduce_perplectic(a: &Matrix) -> Result<XFormResult> {
    normal_to_x_with_tol(a, DEFAULT_TOL)
}

fn scalar_tol(x: &Matrix) -> f64 {
    DEFAULT_CLUSTER_TOL * x.norm_fro().max(1.0)
}

/// A normal matrix with distinct eigenvalues commuting with `A` and `A⋆`.
/// Supplied `alphas` (one per 2×2 block, plus one for a centre) are used as
/// given; otherwise coefficients are searched for the largest eigenvalue gap.
pub fn commuting_distinct_witness(
    a: &Matrix,
    b: &ScalarProduct,
    alphas: Option<&[C64]>,
) -> Result<Matrix> {
    commuting_distinct_witness_seeded(a, b, alphas, 0)
}

pub fn commuting_distinct_witness_seeded(
    a: &Matrix,
    b: &ScalarProduct,
    alphas: Option<&[C64]>,
    seed: u64,
) -> Result<Matrix> {
    let n = a.square_dim()?;
    if b.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix {n}, product {}",
            b.dim()
        )));
    }
    if b.kind() == ProductKind::Symplectic {
        let ap = to_perplectic_frame(a, Direction::Forward)?;
        let m =
            commuting_distinct_witness_seeded(&ap, &ScalarProduct::perplectic(n), alphas, seed)?;
        return to_perplectic_frame(&m, Direction::Backward);
    }
    let red = reduce_perplectic(a)?;
    let xb = XBlocks::of(&red.x);
    let st = scalar_tol(&red.x);
    let gap_thr = DEFAULT_GAP_TOL * a.norm_fro().max(1.0);
    if let Some(al) = alphas {
        if al.len() != xb.blocks.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} blocks",
                al.len(),
                xb.blocks.len()
            )));
        }
        let coeffs: Vec<Coeff> = al
            .iter()
            .map(|&alpha| Coeff { alpha, beta: ZERO })
            .collect();
        let w = build_witness(&red, &coeffs, st)?;
        if min_gap_of(&w.pairs) < gap_thr {
            return Err(Error::AlphaSearchFailed { attempts: 1 });
        }
        return Ok(w.m);
    }
    let mut best: Option<(f64, Matrix)> = None;
    for attempt in 0..WITNESS_CANDIDATES {
        let mut rng = rng_for(seed, attempt);
        let coeffs = random_coeffs(&mut rng, &xb, st);
        let w = build_witness(&red, &coeffs, st)?;
        let gap = min_gap_of(&w.pairs);
        let score = gap / w.m.norm_fro().max(f64::MIN_POSITIVE);
        if gap >= gap_thr && best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, w.m));
        }
    }
    best.map(|(_, m)| m).ok_or(Error::AlphaSearchFailed {
        attempts: WITNESS_CANDIDATES as usize,
    })
}

/// Characteristic polynomial coefficients `c₀, …, c_n` (monic) by
/// Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &Matrix) -> Result<Vec<C64>> {
    let n = a.square_dim()?;
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += c[n + 1 - k];
        }
        m = next;
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    Ok(c)
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting;
/// exact on integer-valued matrices of moderate size.
fn bareiss_det(mut w: Matrix) -> C64 {
    let n = w.rows();
    if n == 0 {
        return ONE;
    }
    let mut sign = 1.0;
    let mut prev = ONE;
    for k in 0..n - 1 {
        let p = (k..n)
            .max_by(|&x, &y| w[(x, k)].norm().total_cmp(&w[(y, k)].norm()))
            .unwrap_or(k);
        if w[(p, k)] == ZERO {
            return ZERO;
        }
        if p != k {
            for j in 0..n {
                let t = w[(k, j)];
                w[(k, j)] = w[(p, j)];
                w[(p, j)] = t;
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                w[(i, j)] = (w[(i, j)] * w[(k, k)] - w[(i, k)] * w[(k, j)]) / prev;
            }
            w[(i, k)] = ZERO;
        }
        prev = w[(k, k)];
    }
    w[(n - 1, n - 1)] * sign
}

/// Sylvester resultant of polynomials given by ascending coefficients.
fn resultant(p: &[C64], q: &[C64]) -> C64 {
    let (dp, dq) = (p.len() - 1, q.len() - 1);
    let size = dp + dq;
    if size == 0 {
        return ONE;
    }
    let mut s = Matrix::zeros(size, size);
    for r in 0..dq {
        for (k, &coef) in p.iter().rev().enumerate() {
            s[(r, r + k)] = coef;
        }
    }
    for r in 0..dp {
        for (k, &coef) in q.iter().rev().enumerate() {
            s[(dq + r, r + k)] = coef;
        }
    }
    bareiss_det(s)
}

/// Discriminant of the characteristic polynomial, `∏_{i<j} (λᵢ − λⱼ)²`;
/// zero exactly when `A` has a multiple eigenvalue.
pub fn discriminant(a: &Matrix) -> Result<C64> {
    let n = a.square_dim()?;
    if n > DISCRIMINANT_CAP {
        return Err(Error::SizeCapExceeded {
            size: n,
            cap: DISCRIMINANT_CAP,
        });
    }
    if n <= 1 {
        return Ok(ONE);
    }
    let p = characteristic_polynomial(a)?;
    let dp: Vec<C64> = (1..=n).map(|k| p[k] * k as f64).collect();
    let sign = if (n * (n - 1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Ok(resultant(&p, &dp) * sign)
}

/// `‖A − Â‖ < ε` perturbation of a diagonalizable `B`-normal matrix to one
/// with distinct eigenvalues, along a commuting witness.
pub fn perturb_to_distinct(
    a: &Matrix,
    b: &ScalarProduct,
    epsilon: f64,
    seed: u64,
) -> Result<PerturbationCertificate> {
    let n = a.square_dim()?;
    if b.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix {n}, product {}",
            b.dim()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if b.kind() == ProductKind::Symplectic {
        let ap = to_perplectic_frame(a, Direction::Forward)?;
        let mut cert = perturb_to_distinct(&ap, &ScalarProduct::perplectic(n), epsilon, seed)?;
        cert.a_hat = to_perplectic_frame(&cert.a_hat, Direction::Backward)?;
        cert.distance_frobenius = (a - &cert.a_hat).norm_fro();
        cert.distance_spectral = (a - &cert.a_hat).norm_spectral();
        cert.normality_residual = normality_residual(&cert.a_hat, b)?;
        return Ok(cert);
    }
    let gap_threshold = DEFAULT_GAP_TOL * a.norm_fro().max(1.0);
    // normality and diagonalizability are checked by the reduction
    let red = reduce_perplectic(a)?;
    let gap0 = min_gap(&eig_default(a)?.values);
    if gap0 >= gap_threshold {
        return Ok(PerturbationCertificate {
            a_hat: a.clone(),
            distance_frobenius: 0.0,
            distance_spectral: 0.0,
            min_gap: gap0,
            gap_threshold,
            c0: ZERO,
            draws: 0,
            normality_residual: normality_residual(a, b)?,
            witness_norm: 0.0,
        });
    }

    // pick the witness that separates the colliding eigenvalues best per unit norm
    let xb = XBlocks::of(&red.x);
    let st = scalar_tol(&red.x);
    let mut best: Option<(f64, Witness)> = None;
    for attempt in 0..WITNESS_CANDIDATES {
        let mut rng = rng_for(seed, attempt);
        let coeffs = random_coeffs(&mut rng, &xb, st);
        let w = build_witness(&red, &coeffs, st)?;
        let norm = w.m.norm_fro().max(f64::MIN_POSITIVE);
        let mut score = f64::INFINITY;
        for i in 0..w.pairs.len() {
            for j in i + 1..w.pairs.len() {
                if (w.pairs[i].0 - w.pairs[j].0).norm() < gap_threshold {
                    score = score.min((w.pairs[i].1 - w.pairs[j].1).norm() / norm);
                }
            }
        }
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, w));
        }
    }
    let (_, witness) = best.expect("at least one candidate");
    let wn = witness.m.norm_fro();
    if wn == 0.0 {
        return Err(Error::SearchExhausted { draws: 0 });
    }
    let radius = epsilon / (2.0 * wn);
    let mut rng = rng_for(seed, WITNESS_CANDIDATES);
    for draw in 1..=MAX_DRAWS {
        // uniform on the open disk
        let r = radius * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let c = c64(r * theta.cos(), r * theta.sin());
        if c == ZERO {
            continue;
        }
        let a_hat = a + &witness.m.scale(c);
        let gap = min_gap(&eig_default(&a_hat)?.values);
        let diff = a - &a_hat;
        let distance_frobenius = diff.norm_fro();
        if gap >= gap_threshold && distance_frobenius < epsilon {
            return Ok(PerturbationCertificate {
                normality_residual: normality_residual(&a_hat, b)?,
                distance_spectral: diff.norm_spectral(),
                distance_frobenius,
                a_hat,
                min_gap: gap,
                gap_threshold,
                c0: c,
                draws: draw,
                witness_norm: wn,
            });
        }
    }
    Err(Error::SearchExhausted { draws: MAX_DRAWS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_examples() {
        let nil = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(discriminant(&nil).unwrap(), ZERO);
        let d2 = Matrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        assert!((discriminant(&d2).unwrap() - ONE).norm() < 1e-14);
        let d3 = Matrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0)]);
        assert!((discriminant(&d3).unwrap() - c64(4.0, 0.0)).norm() < 1e-12);
        assert!(matches!(
            discriminant(&Matrix::identity(13)),
            Err(Error::SizeCapExceeded { size: 13, cap: 12 })
        ));
    }

    #[test]
    fn charpoly_of_companion_like() {
        let a = Matrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let c = characteristic_polynomial(&a).unwrap();
        assert_eq!(c, vec![c64(6.0, 0.0), c64(-5.0, 0.0), ONE]);
    }

    #[test]
    fn witness_for_identity_with_zero_alpha() {
        let a = Matrix::identity(2);
        let m =
            commuting_distinct_witness(&a, &ScalarProduct::perplectic(2), Some(&[ZERO])).unwrap();
        let mut ev: Vec<C64> = eig_default(&m).unwrap().values;
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((ev[0] - ZERO).norm() < 1e-12 && (ev[1] - ONE).norm() < 1e-12);
        assert!((&m * &a - &a * &m).norm_fro() < 1e-14);
    }

    #[test]
    fn witness_with_unit_alpha_reproduces_distinct_input() {
        let a = Matrix::from_diag(&[c64(1.0, 1.0), c64(2.0, 0.0), c64(3.0, -1.0), c64(-1.0, 0.5)]);
        let m = commuting_distinct_witness(&a, &ScalarProduct::perplectic(4), Some(&[ONE, ONE]))
            .unwrap();
        assert!(m.dist(&a) < 1e-12);
    }

    #[test]
    fn perturb_identity() {
        let a = Matrix::identity(2);
        let cert = perturb_to_distinct(&a, &ScalarProduct::perplectic(2), 0.1, 3).unwrap();
        assert!(cert.distance_frobenius < 0.1);
        assert!(cert.min_gap >= cert.gap_threshold);
        assert!(cert.normality_residual < 1e-12);
    }

    #[test]
    fn already_distinct_is_untouched() {
        let a = Matrix::from_diag(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        let cert = perturb_to_distinct(&a, &ScalarProduct::perplectic(2), 0.1, 3).unwrap();
        assert_eq!(cert.c0, ZERO);
        assert_eq!(cert.a_hat, a);
    }
}
