use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("size {0} must be even")]
    OddSize(usize),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("QR iteration did not converge within {max_iter} iterations")]
    NonConvergence { max_iter: usize },
    #[error("matrix is defective (not diagonalizable): {0}")]
    Defective(String),
    #[error("matrix is not normal with respect to the scalar product (residual {residual:.3e} > {threshold:.3e})")]
    NotNormal { residual: f64, threshold: f64 },
    #[error("matrices do not commute (residual {residual:.3e} > {threshold:.3e})")]
    NotCommuting { residual: f64, threshold: f64 },
    #[error("matrix is not {expected} (residual {residual:.3e} > {threshold:.3e})")]
    NotStructured {
        expected: &'static str,
        residual: f64,
        threshold: f64,
    },
    #[error("matrix is not Hermitian/skew-Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("eigenvalue cluster at {value} has no conjugate partner of equal multiplicity")]
    ConjugatePairMismatch { value: String },
    #[error("spectrum is not real (max |Im| = {max_imag:.3e})")]
    NonRealSpectrum { max_imag: f64 },
    #[error(
        "inertia mismatch: expected ({expected_plus}, {expected_minus}), found ({plus}, {minus})"
    )]
    InertiaMismatch {
        expected_plus: usize,
        expected_minus: usize,
        plus: usize,
        minus: usize,
    },
    #[error("could not find coefficients giving distinct eigenvalues after {attempts} attempts")]
    AlphaSearchFailed { attempts: usize },
    #[error("no perturbation coefficient produced distinct eigenvalues in {draws} draws")]
    SearchExhausted { draws: usize },
    #[error("size {size} exceeds the cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("spectrum does not respect the pairing of the class: {0}")]
    InvalidSpectrumPairing(String),
    #[error("matrix exponential overflow (norm {0:.3e})")]
    Overflow(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
