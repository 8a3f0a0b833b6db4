//! Dense complex eigen-kernel.

mod decomposition;
mod expm;
mod inertia;
mod schur;

pub use decomposition::{
    check_diagonalizable, cluster_values, eig, eig_default, joint_eigenspaces, min_gap,
    simultaneous_diagonalize, Diagonalizability, EigenCluster, EigenDecomposition, JointGroup,
    DEFAULT_CLUSTER_TOL, DEFAULT_COND_CAP, DEFAULT_DROP_TOL,
};
pub(crate) use decomposition::{diagonalizability_of, eig_nondefective};
pub use expm::matrix_exp;
pub use inertia::{
    inertia_congruence, inertia_congruence_with_tol, HermitianKind, InertiaCongruence,
};
pub use schur::{default_max_iter, schur, SchurDecomposition};
