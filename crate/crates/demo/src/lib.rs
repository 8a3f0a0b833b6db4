//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; failures come back as `{"error": "..."}`.

use canonform::eigen::eig_default;
use canonform::genericity::perturb_to_distinct;
use canonform::perplectic::normal_to_x;
use canonform::product::classify;
use canonform::symplectic::normal_to_four_diagonal;
use canonform::testkit::{
    normal_c64, product_for, random_structured, rng_for, ClassKind, GeneratorSpec, NormalRoute,
};
use canonform::{Matrix, C64, DEFAULT_TOL};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 16;

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix(a: &Matrix) -> Value {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| complex(a[(i, j)]))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn eigenvalues(a: &Matrix) -> Result<Value, String> {
    let e = eig_default(a).map_err(|e| e.to_string())?;
    Ok(e.values.into_iter().map(complex).collect())
}

fn check_dim(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_DIM {
        return Err(format!("dimension must be between 1 and {MAX_DIM}"));
    }
    Ok(())
}

fn finish(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn reduce_inner(product: &str, n: usize, seed: u64, route: &str) -> Result<Value, String> {
    check_dim(n)?;
    let route: NormalRoute = route.parse().map_err(|e: canonform::Error| e.to_string())?;
    let kind = match product {
        "perplectic" => ClassKind::RNormal,
        "symplectic" => ClassKind::JNormal,
        other => return Err(format!("unknown product `{other}`")),
    };
    let a = random_structured(&GeneratorSpec::new(kind, n, seed).with_route(route))
        .map_err(|e| e.to_string())?;
    let (t, c, residuals, ok) = match kind {
        ClassKind::RNormal => {
            let r = normal_to_x(&a).map_err(|e| e.to_string())?;
            (r.p, r.x, r.residuals, r.ok)
        }
        _ => {
            let r = normal_to_four_diagonal(&a).map_err(|e| e.to_string())?;
            (r.s, r.d4, r.residuals, r.ok)
        }
    };
    Ok(json!({
        "product": product,
        "a": matrix(&a),
        "transform": matrix(&t),
        "canonical": matrix(&c),
        "residuals": residuals,
        "ok": ok,
        "eigenvalues": eigenvalues(&a)?,
    }))
}

/// Random normal matrix for `product` (`perplectic` or `symplectic`) and its
/// structured reduction.
#[wasm_bindgen]
pub fn reduce_random(product: &str, n: usize, seed: u32, route: &str) -> String {
    finish(reduce_inner(product, n, seed.into(), route))
}

fn perturb_inner(product: &str, n: usize, seed: u64, epsilon: f64) -> Result<Value, String> {
    check_dim(n)?;
    let kind = match product {
        "perplectic" => ClassKind::RNormal,
        "symplectic" => ClassKind::JNormal,
        other => return Err(format!("unknown product `{other}`")),
    };
    if n < 2 {
        return Err("need at least two eigenvalues".into());
    }
    let mut rng = rng_for(seed, 0xD0);
    let mut spectrum: Vec<C64> = (0..n - 1).map(|_| normal_c64(&mut rng)).collect();
    spectrum.push(spectrum[0]);
    let a = random_structured(&GeneratorSpec::new(kind, n, seed).with_spectrum(spectrum))
        .map_err(|e| e.to_string())?;
    let b = product_for(kind, n).map_err(|e| e.to_string())?;
    let cert = perturb_to_distinct(&a, &b, epsilon, seed).map_err(|e| e.to_string())?;
    Ok(json!({
        "before": eigenvalues(&a)?,
        "after": eigenvalues(&cert.a_hat)?,
        "c0": complex(cert.c0),
        "distance": cert.distance_frobenius,
        "min_gap": cert.min_gap,
        "gap_threshold": cert.gap_threshold,
        "normality": cert.normality_residual,
        "draws": cert.draws,
    }))
}

/// Normal matrix with a forced double eigenvalue, perturbed within `epsilon`.
#[wasm_bindgen]
pub fn perturb_double(product: &str, n: usize, seed: u32, epsilon: f64) -> String {
    finish(perturb_inner(product, n, seed.into(), epsilon))
}

fn classify_inner(class: &str, n: usize, seed: u64) -> Result<Value, String> {
    check_dim(n)?;
    let kind: ClassKind = class.parse().map_err(|e: canonform::Error| e.to_string())?;
    let a = random_structured(&GeneratorSpec::new(kind, n, seed)).map_err(|e| e.to_string())?;
    let b = product_for(kind, n).map_err(|e| e.to_string())?;
    let rep = classify(&a, &b, DEFAULT_TOL).map_err(|e| e.to_string())?;
    Ok(json!({
        "class": kind.name(),
        "a": matrix(&a),
        "report": rep,
        "eigenvalues": eigenvalues(&a)?,
    }))
}

/// Random member of a structured class with its classification report.
#[wasm_bindgen]
pub fn classify_random(class: &str, n: usize, seed: u32) -> String {
    finish(classify_inner(class, n, seed.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn reduce_both_products() {
        let v = parse(reduce_random("perplectic", 5, 1, "polynomial"));
        assert_eq!(v["ok"], true);
        assert_eq!(v["canonical"].as_array().unwrap().len(), 5);
        let v = parse(reduce_random("symplectic", 6, 1, "x-form"));
        assert_eq!(v["ok"], true);
        let v = parse(reduce_random("symplectic", 5, 1, "x-form"));
        assert!(v["error"].is_string());
    }

    #[test]
    fn perturbation_separates() {
        let v = parse(perturb_double("perplectic", 4, 2, 1e-3));
        assert!(v["distance"].as_f64().unwrap() < 1e-3);
        assert!(v["min_gap"].as_f64().unwrap() >= v["gap_threshold"].as_f64().unwrap());
    }

    #[test]
    fn classify_flags() {
        let v = parse(classify_random("hamiltonian", 4, 3));
        assert_eq!(v["report"]["skewadjoint"]["ok"], true);
        assert!(parse(classify_random("nope", 4, 3))["error"].is_string());
        assert!(parse(classify_random("r-normal", 40, 3))["error"].is_string());
    }
}
