use std::path::Path;
use std::process::{Command, Output};

use canonform::cli::mmio::{read_matrix, write_matrix};
use canonform::{c64, Matrix};
use serde_json::Value;

fn canonform(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canonform"))
        .current_dir(dir)
        .env_remove("CANONFORM_TOL")
        .args(args)
        .output()
        .unwrap()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn generated_per_hermitian_classifies_as_selfadjoint() {
    let d = tempfile::tempdir().unwrap();
    let out = canonform(
        d.path(),
        &[
            "gen",
            "--class",
            "per-hermitian",
            "--dim",
            "4",
            "--seed",
            "7",
            "--out",
            "a.mtx",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = canonform(
        d.path(),
        &["classify", "--product", "perplectic", "--in", "a.mtx"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert_eq!(v["structure"]["selfadjoint"]["ok"], true);
    assert_eq!(v["structure"]["unitary"]["ok"], false);
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn symplectic_round_trip_and_report_file() {
    let d = tempfile::tempdir().unwrap();
    canonform(
        d.path(),
        &[
            "gen", "--class", "j-normal", "--dim", "6", "--seed", "2", "--route", "x-form",
            "--out", "a.mtx",
        ],
    );
    let out = canonform(
        d.path(),
        &[
            "reduce",
            "--product",
            "symplectic",
            "--in",
            "a.mtx",
            "--out-form",
            "d.mtx",
            "--out-transform",
            "s.mtx",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&std::fs::read(d.path().join("r.json")).unwrap());
    assert_eq!(report["product"], "symplectic");
    assert_eq!(report["patterns"]["four-diagonal"]["ok"], true);
    for (_, r) in report["residuals"].as_object().unwrap() {
        let r = r.as_f64().unwrap();
        assert!(r.is_finite() && r >= 0.0);
    }
    let out = canonform(
        d.path(),
        &[
            "verify",
            "--in",
            "a.mtx",
            "--transform",
            "s.mtx",
            "--canonical",
            "d.mtx",
            "--product",
            "symplectic",
            "--pattern",
            "fourdiag",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out.stdout)["verdict"]["pass"], true);
}

#[test]
fn reports_are_deterministic() {
    let d = tempfile::tempdir().unwrap();
    canonform(
        d.path(),
        &[
            "gen", "--class", "r-normal", "--dim", "5", "--seed", "4", "--out", "a.mtx",
        ],
    );
    let args = [
        "reduce",
        "--product",
        "perplectic",
        "--in",
        "a.mtx",
        "--out-form",
        "x.mtx",
        "--out-transform",
        "p.mtx",
    ];
    let first = canonform(d.path(), &args).stdout;
    let second = canonform(d.path(), &args).stdout;
    assert_eq!(first, second);
}

#[test]
fn spectrum_file_and_perturbation() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("spec.txt"), "1 0\n1 0\n2 0.5\n-1 0\n").unwrap();
    let out = canonform(
        d.path(),
        &[
            "gen",
            "--class",
            "r-normal",
            "--dim",
            "4",
            "--seed",
            "1",
            "--spectrum",
            "spec.txt",
            "--out",
            "a.mtx",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = canonform(
        d.path(),
        &[
            "perturb",
            "--product",
            "perplectic",
            "--in",
            "a.mtx",
            "--epsilon",
            "1e-4",
            "--seed",
            "3",
            "--out",
            "h.mtx",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out.stdout);
    assert!(v["residuals"]["distance_frobenius"].as_f64().unwrap() < 1e-4);
    assert!(v["residuals"]["min_gap"].as_f64().unwrap() >= 1e-6);
    let a = read_matrix(&d.path().join("a.mtx")).unwrap();
    let h = read_matrix(&d.path().join("h.mtx")).unwrap();
    assert!(a.dist(&h) < 1e-4 && a.dist(&h) > 0.0);
}

#[test]
fn failure_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    // not normal
    write_matrix(
        &p.join("t.mtx"),
        &Matrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]),
    )
    .unwrap();
    let out = canonform(
        p,
        &[
            "reduce",
            "--product",
            "perplectic",
            "--in",
            "t.mtx",
            "--out-form",
            "x.mtx",
            "--out-transform",
            "p.mtx",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out.stderr)["error"], "not-normal");
    // malformed banner
    std::fs::write(p.join("bad.mtx"), "%%MatrixMarket matrix\n1 1\n0 0\n").unwrap();
    let out = canonform(
        p,
        &["classify", "--product", "perplectic", "--in", "bad.mtx"],
    );
    assert_eq!(out.status.code(), Some(65));
    assert!(json(&out.stderr)["message"]
        .as_str()
        .unwrap()
        .starts_with("line 1"));
    // sparse input
    std::fs::write(
        p.join("sp.mtx"),
        "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
    )
    .unwrap();
    let out = canonform(
        p,
        &["classify", "--product", "perplectic", "--in", "sp.mtx"],
    );
    assert_eq!(out.status.code(), Some(65));
    assert_eq!(json(&out.stderr)["error"], "unsupported-format");
    // odd symplectic size
    write_matrix(&p.join("odd.mtx"), &Matrix::identity(3)).unwrap();
    let out = canonform(
        p,
        &[
            "reduce",
            "--product",
            "symplectic",
            "--in",
            "odd.mtx",
            "--out-form",
            "x.mtx",
            "--out-transform",
            "p.mtx",
        ],
    );
    assert_eq!(out.status.code(), Some(65));
    // usage
    let out = canonform(p, &["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn tolerance_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let a = Matrix::from_diag(&[c64(1.0, 0.0), c64(1.0, 1e-7)]);
    write_matrix(&d.path().join("a.mtx"), &a).unwrap();
    let run = |tol: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_canonform"))
            .current_dir(d.path())
            .env("CANONFORM_TOL", tol)
            .args(["classify", "--product", "perplectic", "--in", "a.mtx"])
            .output()
            .unwrap();
        json(&out.stdout)["structure"]["selfadjoint"]["ok"]
            .as_bool()
            .unwrap()
    };
    assert!(run("1e-3"));
    assert!(!run("1e-12"));
}
