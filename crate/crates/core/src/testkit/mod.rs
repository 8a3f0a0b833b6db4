//! Seeded generators for the structured classes, pattern checks and an
//! independent verification oracle.

mod oracle;

pub use oracle::{oracle_verify_reduction, VerifyReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eigen::{check_diagonalizable, eig_default, matrix_exp, min_gap, DEFAULT_COND_CAP};
use crate::error::{Error, Result};
use crate::matrix::{c64, Matrix, C64, I, ONE};
use crate::pattern::{off_pattern_max, Pattern};
use crate::product::{perplectic_sum, perplectic_sum_all, z_matrix, ScalarProduct};
use crate::symplectic::{to_perplectic_frame, Direction};

/// Default minimum eigenvalue gap of generated matrices.
pub const DEFAULT_MIN_GAP: f64 = 1e-3;
const MAX_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    PerHermitian,
    PerskewHermitian,
    Perplectic,
    RNormal,
    SkewHamiltonian,
    Hamiltonian,
    Symplectic,
    JNormal,
}

impl ClassKind {
    pub const ALL: [ClassKind; 8] = [
        ClassKind::PerHermitian,
        ClassKind::PerskewHermitian,
        ClassKind::Perplectic,
        ClassKind::RNormal,
        ClassKind::SkewHamiltonian,
        ClassKind::Hamiltonian,
        ClassKind::Symplectic,
        ClassKind::JNormal,
    ];

    pub fn is_symplectic_side(self) -> bool {
        matches!(
            self,
            ClassKind::SkewHamiltonian
                | ClassKind::Hamiltonian
                | ClassKind::Symplectic
                | ClassKind::JNormal
        )
    }

    /// The perplectic class in correspondence under `U`.
    pub fn perplectic_counterpart(self) -> ClassKind {
        match self {
            ClassKind::SkewHamiltonian => ClassKind::PerHermitian,
            ClassKind::Hamiltonian => ClassKind::PerskewHermitian,
            ClassKind::Symplectic => ClassKind::Perplectic,
            ClassKind::JNormal => ClassKind::RNormal,
            other => other,
        }
    }

    /// Index into [`crate::product::StructureReport::flags`] of the defining property.
    pub fn flag_index(self) -> usize {
        match self.perplectic_counterpart() {
            ClassKind::PerHermitian => 0,
            ClassKind::PerskewHermitian => 1,
            ClassKind::Perplectic => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassKind::PerHermitian => "per-hermitian",
            ClassKind::PerskewHermitian => "perskew-hermitian",
            ClassKind::Perplectic => "perplectic",
            ClassKind::RNormal => "r-normal",
            ClassKind::SkewHamiltonian => "skew-hamiltonian",
            ClassKind::Hamiltonian => "hamiltonian",
            ClassKind::Symplectic => "symplectic",
            ClassKind::JNormal => "j-normal",
        }
    }
}

impl std::str::FromStr for ClassKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClassKind::ALL
            .into_iter()
            .find(|c| c.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown class `{s}`")))
    }
}

/// Construction used for random normal matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalRoute {
    /// `S − i·q(S)` with per-Hermitian `S` and a real polynomial `q`.
    Polynomial,
    /// `P₀·X·P₀⁻¹` with an X-form normal `X` and perplectic `P₀`.
    XForm,
}

impl std::str::FromStr for NormalRoute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "polynomial" | "poly" => Ok(NormalRoute::Polynomial),
            "x-form" | "xform" | "x" => Ok(NormalRoute::XForm),
            other => Err(Error::InvalidArgument(format!("unknown route `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub class_kind: ClassKind,
    pub dim: usize,
    pub seed: u64,
    pub spectrum: Option<Vec<C64>>,
    pub min_gap: Option<f64>,
    /// Only used by the normal classes; defaults to `Polynomial`.
    pub route: Option<NormalRoute>,
}

impl GeneratorSpec {
    pub fn new(class_kind: ClassKind, dim: usize, seed: u64) -> Self {
        Self {
            class_kind,
            dim,
            seed,
            spectrum: None,
            min_gap: None,
            route: None,
        }
    }

    pub fn with_spectrum(mut self, spectrum: Vec<C64>) -> Self {
        self.spectrum = Some(spectrum);
        self
    }

    pub fn with_route(mut self, route: NormalRoute) -> Self {
        self.route = Some(route);
        self
    }

    pub fn with_min_gap(mut self, gap: f64) -> Self {
        self.min_gap = Some(gap);
        self
    }
}

/// The seeded stream for `attempt` of a given seed.
pub fn rng_for(seed: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    rng
}

pub fn normal_c64(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| normal_c64(rng))
}

fn adjoint_r(a: &Matrix) -> Matrix {
    ScalarProduct::perplectic(a.rows())
        .adjoint(a)
        .expect("square by construction")
}

pub fn random_perhermitian(rng: &mut impl Rng, n: usize) -> Matrix {
    let y = gaussian_matrix(rng, n, n);
    (&y + &adjoint_r(&y)).scale_real(0.5)
}

pub fn random_perskew_hermitian(rng: &mut impl Rng, n: usize) -> Matrix {
    random_perhermitian(rng, n).scale(I)
}

/// `exp(K)` for a perskew-Hermitian `K` with `‖K‖_F` uniform in `[0.5, 2]`.
pub fn random_perplectic(rng: &mut impl Rng, n: usize) -> Matrix {
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let k = random_perskew_hermitian(rng, n);
    let target: f64 = rng.random_range(0.5..=2.0);
    let norm = k.norm_fro();
    let k = if norm > 0.0 {
        k.scale_real(target / norm)
    } else {
        k
    };
    matrix_exp(&k).expect("bounded generator norm")
}

/// Per-Hermitian `S` normalized to `‖S‖_F = √n`.
fn normalized_perhermitian(rng: &mut impl Rng, n: usize) -> Matrix {
    let s = random_perhermitian(rng, n);
    let norm = s.norm_fro();
    if norm > 0.0 {
        s.scale_real((n as f64).sqrt() / norm)
    } else {
        s
    }
}

fn polynomial_normal(rng: &mut impl Rng, n: usize) -> Matrix {
    let s = normalized_perhermitian(rng, n);
    let degree = rng.random_range(1..=3usize);
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.sample(StandardNormal)).collect();
    // Horner evaluation of q(S)
    let mut q = Matrix::identity(n).scale_real(coeffs[degree]);
    for &c in coeffs[..degree].iter().rev() {
        q = &(&q * &s) + &Matrix::identity(n).scale_real(c);
    }
    &s - &q.scale(I)
}

/// Random `R_n`-normal matrix in X-form: `N₁ ⊡ N₂ ⊡ …` with `R₂`-normal
/// 2×2 blocks (and a trailing 1×1 block for odd `n`).
pub fn random_xform_normal(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut blocks: Vec<Matrix> = (0..n / 2)
        .map(|_| {
            let s = random_perhermitian(rng, 2);
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            &s - &(&s.scale_real(a) + &Matrix::identity(2).scale_real(b)).scale(I)
        })
        .collect();
    if n % 2 == 1 {
        blocks.push(Matrix::from_diag(&[normal_c64(rng)]));
    }
    if blocks.is_empty() {
        return Matrix::zeros(0, 0);
    }
    perplectic_sum_all(&blocks).expect("even outer blocks")
}

fn xform_route_normal(rng: &mut impl Rng, n: usize) -> Matrix {
    let x = random_xform_normal(rng, n);
    let p0 = random_perplectic(rng, n);
    &(&p0 * &x) * &p0.inverse().expect("perplectic is invertible")
}

/// How the eigenvalues of a class pair up.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Pairing {
    /// `λ ↔ conj(λ)`, self-paired on the real line.
    Conjugate,
    /// `λ ↔ −conj(λ)`, self-paired on the imaginary axis.
    NegConjugate,
    /// `λ ↔ 1/conj(λ)`, self-paired on the unit circle.
    Inverse,
    None,
}

fn pairing_of(kind: ClassKind) -> Pairing {
    match kind.perplectic_counterpart() {
        ClassKind::PerHermitian => Pairing::Conjugate,
        ClassKind::PerskewHermitian => Pairing::NegConjugate,
        ClassKind::Perplectic => Pairing::Inverse,
        _ => Pairing::None,
    }
}

fn partner(p: Pairing, z: C64) -> C64 {
    match p {
        Pairing::Conjugate => z.conj(),
        Pairing::NegConjugate => -z.conj(),
        Pairing::Inverse => ONE / z.conj(),
        Pairing::None => z,
    }
}

/// Splits a spectrum into `(leading, self_paired)` where every leading value
/// has its partner elsewhere in the list.
fn split_pairs(spectrum: &[C64], p: Pairing, tol: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    let is_self = |z: C64| (partner(p, z) - z).norm() <= tol;
    let is_leading = |z: C64| match p {
        Pairing::Conjugate => z.im > 0.0,
        Pairing::NegConjugate => z.re > 0.0,
        Pairing::Inverse => z.norm() > 1.0,
        Pairing::None => false,
    };
    let mut used = vec![false; spectrum.len()];
    let mut leading = Vec::new();
    let mut fixed = Vec::new();
    for i in 0..spectrum.len() {
        let z = spectrum[i];
        if p == Pairing::Inverse && z.norm() == 0.0 {
            return Err(Error::InvalidSpectrumPairing(
                "zero eigenvalue for a unitary class".into(),
            ));
        }
        if is_self(z) {
            used[i] = true;
            fixed.push(z);
        }
    }
    for i in 0..spectrum.len() {
        if used[i] || !is_leading(spectrum[i]) {
            continue;
        }
        let target = partner(p, spectrum[i]);
        let j = (0..spectrum.len())
            .filter(|&j| !used[j] && j != i && (spectrum[j] - target).norm() <= tol)
            .min_by(|&x, &y| {
                (spectrum[x] - target)
                    .norm()
                    .total_cmp(&(spectrum[y] - target).norm())
            })
            .ok_or_else(|| {
                Error::InvalidSpectrumPairing(format!("{} has no partner {}", spectrum[i], target))
            })?;
        used[i] = true;
        used[j] = true;
        leading.push(spectrum[i]);
    }
    if let Some(i) = (0..spectrum.len()).find(|&i| !used[i]) {
        return Err(Error::InvalidSpectrumPairing(format!(
            "{} has no partner {}",
            spectrum[i],
            partner(p, spectrum[i])
        )));
    }
    Ok((leading, fixed))
}

/// Canonical matrix of a perplectic class with the given spectrum:
/// `(D ⊕ partner(D) reversed) ⊡ Zᴴ·diag(self-paired)·Z`.
fn canonical_with_spectrum(kind: ClassKind, spectrum: &[C64]) -> Result<Matrix> {
    let n = spectrum.len();
    let p = pairing_of(kind);
    if p == Pairing::None {
        return Ok(Matrix::from_diag(spectrum));
    }
    let scale = spectrum.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let (leading, fixed) = split_pairs(spectrum, p, 1e-8 * scale)?;
    let k = fixed.len();
    let z = z_matrix(k);
    let centre = &(&z.h() * &Matrix::from_diag(&fixed)) * &z;
    if leading.is_empty() {
        return Ok(centre);
    }
    let partners: Vec<C64> = leading.iter().rev().map(|&l| partner(p, l)).collect();
    let outer = Matrix::from_diag(&leading).direct_sum(&Matrix::from_diag(&partners));
    let out = perplectic_sum(&outer, &centre)?;
    debug_assert_eq!(out.rows(), n);
    Ok(out)
}

fn generate_perplectic_side(spec: &GeneratorSpec, kind: ClassKind, n: usize) -> Result<Matrix> {
    if let Some(spectrum) = &spec.spectrum {
        if spectrum.len() != n {
            return Err(Error::InvalidArgument(format!(
                "spectrum has {} values for dimension {n}",
                spectrum.len()
            )));
        }
        let canonical = canonical_with_spectrum(kind, spectrum)?;
        let mut rng = rng_for(spec.seed, 0);
        let p0 = random_perplectic(&mut rng, n);
        return Ok(&(&p0 * &canonical) * &p0.inverse()?);
    }
    let gap = spec.min_gap.unwrap_or(DEFAULT_MIN_GAP);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = rng_for(spec.seed, attempt);
        let a = match kind {
            ClassKind::PerHermitian => random_perhermitian(&mut rng, n),
            ClassKind::PerskewHermitian => random_perskew_hermitian(&mut rng, n),
            ClassKind::Perplectic => random_perplectic(&mut rng, n),
            _ => match spec.route.unwrap_or(NormalRoute::Polynomial) {
                NormalRoute::Polynomial => polynomial_normal(&mut rng, n),
                NormalRoute::XForm => xform_route_normal(&mut rng, n),
            },
        };
        if n < 2 {
            return Ok(a);
        }
        let values = eig_default(&a)?.values;
        if min_gap(&values) >= gap && check_diagonalizable(&a, DEFAULT_COND_CAP)?.diagonalizable {
            return Ok(a);
        }
    }
    Err(Error::SearchExhausted {
        draws: MAX_ATTEMPTS as usize,
    })
}

/// Deterministic random matrix of the requested class.
pub fn random_structured(spec: &GeneratorSpec) -> Result<Matrix> {
    let n = spec.dim;
    if spec.class_kind.is_symplectic_side() {
        if !n.is_multiple_of(2) {
            return Err(Error::OddSize(n));
        }
        let a = generate_perplectic_side(spec, spec.class_kind.perplectic_counterpart(), n)?;
        return to_perplectic_frame(&a, Direction::Backward);
    }
    generate_perplectic_side(spec, spec.class_kind, n)
}

/// The scalar product a class is defined by.
pub fn product_for(kind: ClassKind, n: usize) -> Result<ScalarProduct> {
    if kind.is_symplectic_side() {
        ScalarProduct::symplectic(n)
    } else {
        Ok(ScalarProduct::perplectic(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternVerdict {
    pub ok: bool,
    pub max_off_pattern: f64,
}

/// Pattern check with threshold `tol · max(1, ‖A‖_F)`.
pub fn check_pattern(a: &Matrix, pattern: Pattern, tol: f64) -> Result<PatternVerdict> {
    let max_off_pattern = off_pattern_max(a, pattern)?;
    Ok(PatternVerdict {
        ok: max_off_pattern <= tol * a.norm_fro().max(1.0),
        max_off_pattern,
    })
}
