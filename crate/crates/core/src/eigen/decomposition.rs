//! Eigenvalues, eigenvectors and eigenvalue clusters on top of the Schur form.

use serde::{Deserialize, Serialize};

use super::schur::{default_max_iter, schur};
use crate::error::{Error, Result};
use crate::matrix::{numerical_rank, orthonormalize_columns, Matrix, C64, ONE, ZERO};

/// Default relative clustering threshold, scaled by `max(1, ‖A‖_F)`.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;
/// Column-pivoted QR drop tolerance for eigenvector rank decisions.
pub const DEFAULT_DROP_TOL: f64 = 1e-8;
/// Cap on the eigenvector matrix condition estimate.
pub const DEFAULT_COND_CAP: f64 = 1e8;

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Arithmetic mean of the member eigenvalues.
    pub value: C64,
    pub multiplicity: usize,
    /// Columns of [`EigenDecomposition::vectors`] belonging to this cluster.
    pub column_indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors, one column per entry of `values`.
    pub vectors: Matrix,
    /// Clusters ordered by imaginary part descending, then real part ascending.
    pub clusters: Vec<EigenCluster>,
    /// Absolute threshold the clusters were formed with.
    pub cluster_threshold: f64,
}

impl EigenDecomposition {
    /// Orthonormal basis of the eigenvectors of cluster `idx`.
    pub fn cluster_basis(&self, idx: usize) -> Matrix {
        orthonormalize_columns(
            &self
                .vectors
                .select_columns(&self.clusters[idx].column_indices),
        )
    }

    /// Largest `|Im λ|` over all eigenvalues.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Eigendecomposition with clustering threshold `cluster_tol · max(1, ‖A‖_F)`.
pub fn eig(a: &Matrix, cluster_tol: f64) -> Result<EigenDecomposition> {
    let n = a.square_dim()?;
    let threshold = cluster_tol * a.norm_fro().max(1.0);
    let s = schur(a, default_max_iter(n))?;
    let values = s.t.diag();
    let clusters = cluster_values(&values, threshold);

    let mut owner = vec![0usize; n];
    for (c, cl) in clusters.iter().enumerate() {
        for &j in &cl.column_indices {
            owner[j] = c;
        }
    }

    // back-substitution on (T - t_kk I) x = 0 with x_k = 1; entries whose
    // diagonal lies in the same cluster are free and set to zero
    let t = &s.t;
    let tnorm = t.norm_fro().max(f64::MIN_POSITIVE);
    let mut x = Matrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = ONE;
        for j in (0..k).rev() {
            if owner[j] == owner[k] {
                continue;
            }
            let mut sum = ZERO;
            for l in j + 1..=k {
                sum += t[(j, l)] * x[(l, k)];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < f64::EPSILON * tnorm {
                denom = C64::new(f64::EPSILON * tnorm, 0.0);
            }
            x[(j, k)] = -sum / denom;
        }
    }
    let mut vectors = &s.q * &x;
    for k in 0..n {
        let col = vectors.column(k);
        let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let col: Vec<C64> = col.iter().map(|z| z / nrm).collect();
        vectors.set_column(k, &col);
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        clusters,
        cluster_threshold: threshold,
    })
}

/// Eigendecomposition with [`DEFAULT_CLUSTER_TOL`].
pub fn eig_default(a: &Matrix) -> Result<EigenDecomposition> {
    eig(a, DEFAULT_CLUSTER_TOL)
}

/// Single-linkage clustering with an absolute threshold. Representatives are
/// member means; near-real representatives have their imaginary part
/// compared as zero when ordering.
pub fn cluster_values(values: &[C64], threshold: f64) -> Vec<EigenCluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    let mut clusters: Vec<EigenCluster> = groups
        .into_iter()
        .map(|idx| {
            let value = idx.iter().map(|&i| values[i]).sum::<C64>() / idx.len() as f64;
            EigenCluster {
                value,
                multiplicity: idx.len(),
                column_indices: idx,
            }
        })
        .collect();
    let key_im = |z: C64| if z.im.abs() <= threshold { 0.0 } else { z.im };
    clusters.sort_by(|a, b| {
        key_im(b.value)
            .total_cmp(&key_im(a.value))
            .then(a.value.re.total_cmp(&b.value.re))
    });
    clusters
}

/// Smallest pairwise distance between eigenvalues (infinity for `n < 2`).
pub fn min_gap(values: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagonalizability {
    pub diagonalizable: bool,
    /// 1-norm condition estimate of the eigenvector matrix.
    pub cond_estimate: f64,
    /// Largest relative eigenpair residual `‖Av − λv‖ / max(1, ‖A‖_F)`.
    pub max_residual: f64,
}

/// Decides diagonalizability from the computed eigenvectors: the eigenvector
/// matrix must be invertible with condition at most `cond_cap`, every
/// cluster's eigenvector block must have full rank, and every eigenpair
/// residual must be below the drop tolerance.
pub fn check_diagonalizable(a: &Matrix, cond_cap: f64) -> Result<Diagonalizability> {
    let e = eig_default(a)?;
    Ok(diagonalizability_of(a, &e, cond_cap, DEFAULT_DROP_TOL))
}

pub(crate) fn diagonalizability_of(
    a: &Matrix,
    e: &EigenDecomposition,
    cond_cap: f64,
    drop_tol: f64,
) -> Diagonalizability {
    let n = a.rows();
    if n == 0 {
        return Diagonalizability {
            diagonalizable: true,
            cond_estimate: 1.0,
            max_residual: 0.0,
        };
    }
    let scale = a.norm_fro().max(1.0);
    let mut max_residual = 0.0f64;
    for (k, &lambda) in e.values.iter().enumerate() {
        let v = e.vectors.column(k);
        let av = a.mul_vec(&v);
        let r = av
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(r / scale);
    }
    let cond_estimate = match e.vectors.inverse() {
        Ok(inv) => e.vectors.norm_one() * inv.norm_one(),
        Err(_) => f64::INFINITY,
    };
    let ranks_ok = e.clusters.iter().all(|c| {
        numerical_rank(&e.vectors.select_columns(&c.column_indices), drop_tol) == c.multiplicity
    });
    Diagonalizability {
        diagonalizable: ranks_ok && cond_estimate <= cond_cap && max_residual <= drop_tol,
        cond_estimate,
        max_residual,
    }
}

/// Eigendecomposition that fails with `Defective` unless the matrix passes
/// [`check_diagonalizable`]'s criteria.
pub(crate) fn eig_nondefective(a: &Matrix, cluster_tol: f64) -> Result<EigenDecomposition> {
    let e = eig(a, cluster_tol)?;
    let d = diagonalizability_of(a, &e, DEFAULT_COND_CAP, DEFAULT_DROP_TOL);
    if !d.diagonalizable {
        return Err(Error::Defective(format!(
            "eigenvector condition {:.3e}, max eigenpair residual {:.3e}",
            d.cond_estimate, d.max_residual
        )));
    }
    Ok(e)
}

/// One joint eigenspace of a commuting pair.
#[derive(Debug, Clone)]
pub struct JointGroup {
    pub a_value: C64,
    pub b_value: C64,
    /// Orthonormal basis of the joint eigenspace.
    pub basis: Matrix,
    /// Index of the `A`-cluster this group belongs to.
    pub a_cluster: usize,
}

/// Joint eigenspaces of commuting diagonalizable `A` and `B`, grouped by
/// `A`-cluster first and `B`-eigenvalue inside each cluster.
pub fn joint_eigenspaces(
    a: &Matrix,
    b: &Matrix,
    tol: f64,
    cluster_tol: f64,
) -> Result<Vec<JointGroup>> {
    let n = a.square_dim()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pair of orders {n} and {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let comm = (a * b - b * a).norm_fro();
    let threshold = tol * a.norm_fro().max(1.0) * b.norm_fro().max(1.0);
    if comm > threshold {
        return Err(Error::NotCommuting {
            residual: comm,
            threshold,
        });
    }
    let ea = eig_nondefective(a, cluster_tol)?;
    let mut groups = Vec::new();
    for (ci, cl) in ea.clusters.iter().enumerate() {
        let v = ea.cluster_basis(ci);
        // B restricted to the invariant subspace span(v)
        let bc = &(&v.h() * b) * &v;
        let eb = eig_nondefective(&bc, cluster_tol)
            .map_err(|_| Error::Defective("restriction of the second matrix".into()))?;
        for (bi, bcl) in eb.clusters.iter().enumerate() {
            let w = eb.cluster_basis(bi);
            groups.push(JointGroup {
                a_value: cl.value,
                b_value: bcl.value,
                basis: &v * &w,
                a_cluster: ci,
            });
        }
    }
    Ok(groups)
}

/// Returns `T` with `T⁻¹AT` and `T⁻¹BT` both diagonal.
pub fn simultaneous_diagonalize(a: &Matrix, b: &Matrix, tol: f64) -> Result<Matrix> {
    let groups = joint_eigenspaces(a, b, tol, DEFAULT_CLUSTER_TOL)?;
    let parts: Vec<&Matrix> = groups.iter().map(|g| &g.basis).collect();
    Ok(Matrix::hcat(&parts))
}
