//! The `canonform` command line: Matrix Market in, Matrix Market and JSON
//! reports out.

pub mod mmio;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::genericity::perturb_to_distinct;
use crate::matrix::{c64, C64};
use crate::pattern::Pattern;
use crate::perplectic::normal_to_x_with_tol;
use crate::product::{classify, ProductKind, ScalarProduct, DEFAULT_TOL};
use crate::symplectic::normal_to_four_diagonal_with_tol;
use crate::testkit::{
    oracle_verify_reduction, product_for, random_structured, ClassKind, GeneratorSpec, NormalRoute,
    PatternVerdict,
};
use mmio::{read_matrix, write_matrix, MmError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_DEFECTIVE: i32 = 2;
pub const EXIT_NOT_NORMAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "CANONFORM_TOL";
/// Default tolerance of `verify`, looser than the reduction's own checks so
/// that reductions accepted by `reduce` are confirmed.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "canonform",
    version,
    about = "Canonical forms of perplectic- and symplectic-normal matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure residuals of a matrix for a scalar product.
    Classify(ClassifyArgs),
    /// Reduce to X-form (perplectic) or four-diagonal form (symplectic).
    Reduce(ReduceArgs),
    /// Generate a random structured matrix.
    Gen(GenArgs),
    /// Perturb to distinct eigenvalues within epsilon.
    Perturb(PerturbArgs),
    /// Independently check a reduction given by three files.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, value_parser = parse_product)]
    product: ProductKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_parser = parse_product)]
    product: ProductKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_form: PathBuf,
    #[arg(long)]
    out_transform: PathBuf,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_parser = parse_class)]
    class: ClassKind,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    seed: u64,
    /// One eigenvalue per line, `re [im]`.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    #[arg(long, value_parser = parse_route)]
    route: Option<NormalRoute>,
    #[arg(long)]
    min_gap: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[arg(long, value_parser = parse_product)]
    product: ProductKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    transform: PathBuf,
    #[arg(long)]
    canonical: PathBuf,
    #[arg(long, value_parser = parse_product)]
    product: ProductKind,
    #[arg(long, value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_product(s: &str) -> Result<ProductKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_class(s: &str) -> Result<ClassKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_route(s: &str) -> Result<NormalRoute, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_pattern(s: &str) -> Result<Pattern, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed command: exit code plus the error object written to stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
    /// Partial report (for `reduce` and `verify` verdict failures).
    report: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Defective(_) => (EXIT_DEFECTIVE, "defective"),
            Error::NotNormal { .. } => (EXIT_NOT_NORMAL, "not-normal"),
            Error::DimensionMismatch(_) => (EXIT_PARSE, "dimension-mismatch"),
            Error::NotSquare { .. } => (EXIT_PARSE, "not-square"),
            Error::OddSize(_) => (EXIT_PARSE, "odd-size"),
            Error::InvalidSpectrumPairing(_) => (EXIT_PARSE, "invalid-spectrum-pairing"),
            Error::InvalidArgument(_) => (EXIT_USAGE, "invalid-argument"),
            _ => (EXIT_INTERNAL, "internal"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
            report: None,
        }
    }
}

impl From<MmError> for Failure {
    fn from(e: MmError) -> Self {
        let kind = match &e {
            MmError::Parse { .. } => "parse",
            MmError::UnsupportedFormat(_) => "unsupported-format",
            MmError::Io { .. } => "io",
        };
        Failure {
            code: EXIT_PARSE,
            kind,
            message: e.to_string(),
            report: None,
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        kind: "io",
        message: format!("{}: {e}", path.display()),
        report: None,
    }
}

/// Tolerance from the flag, then `CANONFORM_TOL`, then `default`.
fn resolve_tol(flag: Option<f64>, default: f64) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v.trim().parse::<f64>().map_err(|e| Failure {
                code: EXIT_USAGE,
                kind: "invalid-argument",
                message: format!("{TOL_ENV}=`{v}`: {e}"),
                report: None,
            })?,
            Err(_) => default,
        },
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(
            Error::InvalidArgument(format!("tolerance must be nonnegative, got {tol}")).into(),
        );
    }
    Ok(tol)
}

fn digest(path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| {
        Failure::from(MmError::Io {
            path: path.display().to_string(),
            source: e,
        })
    })?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

fn complex_json(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Parses a spectrum file: one eigenvalue per line as `re` or `re im`;
/// blank lines and lines starting with `#` or `%` are skipped.
pub fn parse_spectrum(text: &str) -> Result<Vec<C64>, MmError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let vals: Vec<f64> = t
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| MmError::Parse {
                line: i + 1,
                message: format!("bad number: {e}"),
            })?;
        out.push(match vals.as_slice() {
            [re] => c64(*re, 0.0),
            [re, im] => c64(*re, *im),
            _ => {
                return Err(MmError::Parse {
                    line: i + 1,
                    message: "expected `re` or `re im`".into(),
                })
            }
        });
    }
    Ok(out)
}

struct Ctx<'a> {
    argv: &'a [String],
}

impl Ctx<'_> {
    fn base(&self, status: i32) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(self.argv));
        m.insert("exit_status".into(), json!(status));
        m
    }
}

fn classify_cmd(ctx: &Ctx, args: &ClassifyArgs) -> Result<Value, Failure> {
    let tol = resolve_tol(args.tol, DEFAULT_TOL)?;
    let a = read_matrix(&args.input)?;
    let b = ScalarProduct::new(args.product, a.square_dim()?)?;
    let rep = classify(&a, &b, tol)?;
    let mut m = ctx.base(EXIT_OK);
    m.insert("input".into(), json!(path_str(&args.input)));
    m.insert("input_digest".into(), json!(digest(&args.input)?));
    m.insert("product".into(), json!(args.product));
    let residuals: BTreeMap<&str, f64> = [
        ("selfadjoint", rep.selfadjoint.frobenius),
        ("skewadjoint", rep.skewadjoint.frobenius),
        ("unitary", rep.unitary.frobenius),
        ("normal", rep.normal.frobenius),
    ]
    .into_iter()
    .collect();
    m.insert("residuals".into(), json!(residuals));
    m.insert("structure".into(), json!(rep));
    Ok(Value::Object(m))
}

fn reduce_cmd(ctx: &Ctx, args: &ReduceArgs) -> Result<Value, Failure> {
    let tol = resolve_tol(args.tol, DEFAULT_TOL)?;
    let a = read_matrix(&args.input)?;
    let n = a.square_dim()?;
    let b = ScalarProduct::new(args.product, n)?;
    let (t, c, residuals, threshold, ok, peeled, pattern) = match args.product {
        ProductKind::Perplectic => {
            let r = normal_to_x_with_tol(&a, tol)?;
            (
                r.p,
                r.x,
                r.residuals,
                r.threshold,
                r.ok,
                r.peeled,
                Pattern::XForm,
            )
        }
        ProductKind::Symplectic => {
            let r = normal_to_four_diagonal_with_tol(&a, tol)?;
            (
                r.s,
                r.d4,
                r.residuals,
                r.threshold,
                r.ok,
                r.peeled,
                Pattern::FourDiagonal,
            )
        }
    };
    write_matrix(&args.out_form, &c)?;
    write_matrix(&args.out_transform, &t)?;
    let off = residuals.get("off_pattern").copied().unwrap_or(0.0);
    let verdict = PatternVerdict {
        ok: off <= 10.0 * threshold,
        max_off_pattern: off,
    };
    let oracle = oracle_verify_reduction(&a, &t, &c, &b, pattern, VERIFY_TOL)?;
    let status = if ok { EXIT_OK } else { EXIT_FAILED };
    let mut m = ctx.base(status);
    m.insert("input".into(), json!(path_str(&args.input)));
    m.insert("input_digest".into(), json!(digest(&args.input)?));
    m.insert("product".into(), json!(args.product));
    m.insert("tol".into(), json!(tol));
    m.insert("threshold".into(), json!(threshold));
    m.insert("residuals".into(), json!(residuals));
    let name = match pattern {
        Pattern::XForm => "x-form",
        _ => "four-diagonal",
    };
    m.insert("patterns".into(), json!({ name: verdict }));
    m.insert("peeled".into(), json!(peeled));
    m.insert("canonical".into(), json!(path_str(&args.out_form)));
    m.insert("transform".into(), json!(path_str(&args.out_transform)));
    m.insert("oracle".into(), json!(oracle));
    m.insert("ok".into(), json!(ok));
    let report = Value::Object(m);
    if let Some(p) = &args.report {
        write_json(p, &report)?;
    }
    if ok {
        Ok(report)
    } else {
        Err(Failure {
            code: EXIT_FAILED,
            kind: "residual-check",
            message: format!("a reduction residual exceeds {:.3e}", 10.0 * threshold),
            report: Some(report),
        })
    }
}

fn gen_cmd(ctx: &Ctx, args: &GenArgs) -> Result<Value, Failure> {
    let mut spec = GeneratorSpec::new(args.class, args.dim, args.seed);
    if let Some(p) = &args.spectrum {
        let text = std::fs::read_to_string(p).map_err(|e| {
            Failure::from(MmError::Io {
                path: path_str(p),
                source: e,
            })
        })?;
        spec = spec.with_spectrum(parse_spectrum(&text)?);
    }
    if let Some(r) = args.route {
        spec = spec.with_route(r);
    }
    if let Some(g) = args.min_gap {
        spec = spec.with_min_gap(g);
    }
    let a = random_structured(&spec)?;
    write_matrix(&args.out, &a)?;
    let b = product_for(args.class, args.dim)?;
    let rep = classify(&a, &b, DEFAULT_TOL)?;
    let mut m = ctx.base(EXIT_OK);
    m.insert("class".into(), json!(args.class));
    m.insert("dim".into(), json!(args.dim));
    m.insert("seed".into(), json!(args.seed));
    m.insert("product".into(), json!(b.kind()));
    m.insert("output".into(), json!(path_str(&args.out)));
    m.insert("output_digest".into(), json!(digest(&args.out)?));
    m.insert("structure".into(), json!(rep));
    Ok(Value::Object(m))
}

fn perturb_cmd(ctx: &Ctx, args: &PerturbArgs) -> Result<Value, Failure> {
    let a = read_matrix(&args.input)?;
    let b = ScalarProduct::new(args.product, a.square_dim()?)?;
    let cert = perturb_to_distinct(&a, &b, args.epsilon, args.seed)?;
    write_matrix(&args.out, &cert.a_hat)?;
    let mut m = ctx.base(EXIT_OK);
    m.insert("input".into(), json!(path_str(&args.input)));
    m.insert("input_digest".into(), json!(digest(&args.input)?));
    m.insert("product".into(), json!(args.product));
    m.insert("epsilon".into(), json!(args.epsilon));
    m.insert("seed".into(), json!(args.seed));
    m.insert("a_hat".into(), json!(path_str(&args.out)));
    m.insert("c0".into(), complex_json(cert.c0));
    m.insert("draws".into(), json!(cert.draws));
    let residuals: BTreeMap<&str, f64> = [
        ("distance_frobenius", cert.distance_frobenius),
        ("distance_spectral", cert.distance_spectral),
        ("min_gap", cert.min_gap),
        ("gap_threshold", cert.gap_threshold),
        ("normality", cert.normality_residual),
        ("witness_norm", cert.witness_norm),
    ]
    .into_iter()
    .collect();
    m.insert("residuals".into(), json!(residuals));
    Ok(Value::Object(m))
}

fn verify_cmd(ctx: &Ctx, args: &VerifyArgs) -> Result<Value, Failure> {
    let tol = resolve_tol(args.tol, VERIFY_TOL)?;
    let a = read_matrix(&args.input)?;
    let t = read_matrix(&args.transform)?;
    let c = read_matrix(&args.canonical)?;
    let b = ScalarProduct::new(args.product, a.square_dim()?)?;
    let v = oracle_verify_reduction(&a, &t, &c, &b, args.pattern, tol)?;
    let status = if v.pass { EXIT_OK } else { EXIT_FAILED };
    let mut m = ctx.base(status);
    m.insert("input".into(), json!(path_str(&args.input)));
    m.insert("input_digest".into(), json!(digest(&args.input)?));
    m.insert("transform".into(), json!(path_str(&args.transform)));
    m.insert("canonical".into(), json!(path_str(&args.canonical)));
    m.insert("product".into(), json!(args.product));
    let residuals: BTreeMap<&str, f64> = [
        ("structure", v.structure),
        ("similarity", v.similarity),
        ("pattern", v.pattern_residual),
    ]
    .into_iter()
    .collect();
    m.insert("residuals".into(), json!(residuals));
    m.insert("verdict".into(), json!(v));
    let report = Value::Object(m);
    if v.pass {
        Ok(report)
    } else {
        Err(Failure {
            code: EXIT_FAILED,
            kind: "verification",
            message: "reduction failed independent verification".into(),
            report: Some(report),
        })
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        kind: "internal",
        message: e.to_string(),
        report: None,
    })?;
    std::fs::write(path, text + "\n").map_err(|e| io_failure(path, e))
}

fn emit(out: &mut dyn Write, v: &Value) {
    let _ = serde_json::to_writer_pretty(&mut *out, v);
    let _ = writeln!(out);
}

/// Runs the command line `argv` (including the program name) and returns the
/// exit code. Reports go to `out`, error objects to `err`.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            emit(
                err,
                &json!({ "error": "usage", "message": e.to_string(), "exit_status": EXIT_USAGE }),
            );
            return EXIT_USAGE;
        }
    };
    let ctx = Ctx { argv };
    let result = match &cli.command {
        Command::Classify(a) => classify_cmd(&ctx, a),
        Command::Reduce(a) => reduce_cmd(&ctx, a),
        Command::Gen(a) => gen_cmd(&ctx, a),
        Command::Perturb(a) => perturb_cmd(&ctx, a),
        Command::Verify(a) => verify_cmd(&ctx, a),
    };
    match result {
        Ok(v) => {
            emit(out, &v);
            EXIT_OK
        }
        Err(f) => {
            if let Some(r) = &f.report {
                emit(out, r);
            }
            emit(
                err,
                &json!({ "error": f.kind, "message": f.message, "exit_status": f.code }),
            );
            f.code
        }
    }
}
