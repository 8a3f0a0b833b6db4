//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use canonform::eigen::{
    default_max_iter, eig_default, inertia_congruence, min_gap, schur, HermitianKind,
};
use canonform::genericity::{commuting_distinct_witness_seeded, discriminant, perturb_to_distinct};
use canonform::pattern::bisymmetry_residuals;
use canonform::perplectic::{
    normal_to_x, peel_nonreal, peel_nonreal_pair, real_pair_to_x, split_self_skew,
};
use canonform::product::{
    adjoint_star, classify, perplectic_sum, reverse_identity, selfadjoint_residual,
    symplectic_unit, u_matrix, unshuffle_permutation, z_matrix,
};
use canonform::symplectic::normal_to_four_diagonal;
use canonform::testkit::{
    gaussian_matrix, normal_c64, oracle_verify_reduction, product_for, random_perhermitian,
    random_structured, rng_for, ClassKind, GeneratorSpec, NormalRoute,
};
use canonform::{c64, Matrix, Pattern, ScalarProduct, C64};
use rand::Rng;

type Outcome = (bool, String);

fn signature(n: usize) -> Matrix {
    let p = n.div_ceil(2);
    Matrix::from_diag(
        &(0..n)
            .map(|i| c64(if i < p { 1.0 } else { -1.0 }, 0.0))
            .collect::<Vec<_>>(),
    )
}

fn c1_identities() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=16 {
        let z = z_matrix(n);
        worst = worst.max((&(&z.h() * &signature(n)) * &z).dist(&reverse_identity(n)));
        let r = reverse_identity(n);
        worst = worst.max((&r * &r).dist(&Matrix::identity(n)));
        if n % 2 == 0 {
            let u = u_matrix(n).unwrap();
            let ir = r.scale(c64(0.0, 1.0));
            worst = worst.max((&(&u.h() * &ir) * &u).dist(&symplectic_unit(n)));
            let j = symplectic_unit(n);
            worst = worst.max((&j * &j).dist(&Matrix::identity(n).scale_real(-1.0)));
        }
    }
    for seed in 0..50 {
        let mut rng = rng_for(seed, 1);
        let (l, k) = (rng.random_range(1..=4), rng.random_range(0..=5));
        let p = gaussian_matrix(&mut rng, 2 * l, 2 * l);
        let q = gaussian_matrix(&mut rng, k, k);
        let r = unshuffle_permutation(l, k);
        let lhs = &(&r.t() * &perplectic_sum(&p, &q).unwrap()) * &r;
        worst = worst.max(lhs.dist(&p.direct_sum(&q)));
    }
    (worst <= 1e-14, format!("max abs residual {worst:.2e}"))
}

fn c2_perplectic_sum_algebra() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..200 {
        let mut rng = rng_for(seed, 2);
        let (l, k) = (rng.random_range(1..=4), rng.random_range(1..=5));
        let p = gaussian_matrix(&mut rng, 2 * l, 2 * l);
        let q = gaussian_matrix(&mut rng, k, k);
        let s = gaussian_matrix(&mut rng, 2 * l, 2 * l);
        let w = gaussian_matrix(&mut rng, k, k);
        let sum = |a: &Matrix, b: &Matrix| perplectic_sum(a, b).unwrap();
        let scale = p.norm_fro() * q.norm_fro().max(1.0);
        // conjugate transpose and inverse
        let r = sum(&p, &q).h().dist(&sum(&p.h(), &q.h())) / scale;
        worst = worst.max(r);
        let inv = sum(&p, &q).inverse().unwrap();
        let r =
            inv.dist(&sum(&p.inverse().unwrap(), &q.inverse().unwrap())) / inv.norm_fro().max(1.0);
        worst = worst.max(r);
        // products
        let r = (&sum(&p, &q) * &sum(&s, &w)).dist(&sum(&(&p * &s), &(&q * &w)))
            / (scale * s.norm_fro() * w.norm_fro().max(1.0));
        worst = worst.max(r);
        // selfadjointness both ways: the squared residual splits over the parts
        let ph = random_perhermitian(&mut rng, 2 * l);
        let qh = random_perhermitian(&mut rng, k);
        let rp =
            |m: &Matrix| selfadjoint_residual(m, &ScalarProduct::perplectic(m.rows())).unwrap();
        let r = rp(&sum(&ph, &qh)) / (ph.norm_fro() + qh.norm_fro());
        worst = worst.max(r);
        let split = (rp(&sum(&p, &q)).powi(2) - rp(&p).powi(2) - rp(&q).powi(2)).abs();
        worst = worst.max(split / (scale * scale));
        let skew = |m: &Matrix| m.scale(c64(0.0, 1.0));
        let rs = |m: &Matrix| {
            let b = ScalarProduct::perplectic(m.rows());
            (m + &adjoint_star(m, &b).unwrap()).norm_fro()
        };
        worst = worst.max(rs(&sum(&skew(&ph), &skew(&qh))) / (ph.norm_fro() + qh.norm_fro()));
        let mixed = rs(&sum(&skew(&ph), &qh));
        if mixed <= 1e-3 * qh.norm_fro() {
            return (false, format!("seed {seed}: mixed sum passes as perskew"));
        }
    }
    (worst <= 1e-12, format!("max relative residual {worst:.2e}"))
}

fn verify_pipeline(kind: ClassKind, dims: &[usize]) -> Outcome {
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut count = 0;
    for route in [NormalRoute::Polynomial, NormalRoute::XForm] {
        for &n in dims {
            for seed in 0..100u64 {
                count += 1;
                let a = random_structured(&GeneratorSpec::new(kind, n, seed).with_route(route))
                    .unwrap();
                let b = product_for(kind, n).unwrap();
                let (t, c, pattern) = match kind {
                    ClassKind::RNormal => match normal_to_x(&a) {
                        Ok(r) => (r.p, r.x, Pattern::XForm),
                        Err(e) => {
                            fails.push(format!("{route:?} n={n} seed={seed}: {e}"));
                            continue;
                        }
                    },
                    _ => match normal_to_four_diagonal(&a) {
                        Ok(r) => (r.s, r.d4, Pattern::FourDiagonal),
                        Err(e) => {
                            fails.push(format!("{route:?} n={n} seed={seed}: {e}"));
                            continue;
                        }
                    },
                };
                let v = oracle_verify_reduction(&a, &t, &c, &b, pattern, 1e-8).unwrap();
                let s = a.norm_fro().max(1.0);
                worst = worst
                    .max(v.structure / s)
                    .max(v.similarity / s)
                    .max(v.pattern_residual / s);
                if !v.pass {
                    fails.push(format!("{route:?} n={n} seed={seed}"));
                }
            }
        }
    }
    (
        fails.is_empty(),
        format!(
            "{count} cases, {} failures, worst relative residual {worst:.2e}{}",
            fails.len(),
            fails
                .first()
                .map(|f| format!(" (first: {f})"))
                .unwrap_or_default()
        ),
    )
}

fn c5_stage_contracts() -> Outcome {
    let mut worst_imag = 0.0f64;
    let mut worst_bisym = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = rng_for(seed, 5);
        let n = rng.random_range(2..=10);
        let a = random_perhermitian(&mut rng, n);
        let r = match peel_nonreal(&a) {
            Ok(r) => r,
            Err(e) => return (false, format!("peel n={n} seed={seed}: {e}")),
        };
        if r.a_hat.rows() > 0 {
            worst_imag = worst_imag.max(eig_default(&r.a_hat).unwrap().max_imag());
        }

        let an = random_structured(&GeneratorSpec::new(ClassKind::RNormal, n, seed)).unwrap();
        let (s, k) = split_self_skew(&an).unwrap();
        let pair = match peel_nonreal_pair(&s, &k) {
            Ok(p) => p,
            Err(e) => return (false, format!("pair peel n={n} seed={seed}: {e}")),
        };
        if pair.a_hat.rows() == 0 {
            continue;
        }
        let rp = match real_pair_to_x(&pair.a_hat, &pair.b_hat) {
            Ok(r) => r,
            Err(e) => return (false, format!("real pair n={n} seed={seed}: {e}")),
        };
        for x in [&rp.x_a, &rp.x_b] {
            let b = bisymmetry_residuals(x).unwrap();
            let scale = x.norm_fro().max(1.0);
            worst_bisym = worst_bisym
                .max(b.symmetric / scale)
                .max(b.persymmetric / scale)
                .max(b.imaginary / scale);
        }
    }
    (
        worst_imag <= 1e-7 && worst_bisym <= 1e-8,
        format!("max |Im| after peel {worst_imag:.2e}, max bisymmetry residual {worst_bisym:.2e}"),
    )
}

fn c6_spectrum_pairing() -> Outcome {
    let mut worst_pair = 0.0f64;
    let mut worst_gram = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = rng_for(seed, 6);
        let n = rng.random_range(1..=10);
        let a = random_perhermitian(&mut rng, n);
        let e = eig_default(&a).unwrap();
        // match each eigenvalue with an unused conjugate
        let mut used = vec![false; n];
        for &l in &e.values {
            let (j, d) = (0..n)
                .filter(|&j| !used[j])
                .map(|j| (j, (e.values[j] - l.conj()).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            used[j] = true;
            worst_pair = worst_pair.max(d);
        }
        let r = reverse_identity(n);
        for i in 0..n {
            for j in 0..n {
                if (e.values[j] - e.values[i].conj()).norm() > 1e-3 {
                    let x = Matrix::from_fn(n, 1, |k, _| e.vectors[(k, i)]);
                    let y = Matrix::from_fn(n, 1, |k, _| e.vectors[(k, j)]);
                    worst_gram = worst_gram.max((&(&x.h() * &r) * &y)[(0, 0)].norm());
                }
            }
        }
    }
    (
        worst_pair <= 1e-8 && worst_gram <= 1e-8,
        format!("conjugate pairing {worst_pair:.2e}, Gram entries {worst_gram:.2e}"),
    )
}

fn c7_inertia() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=12 {
        let r = reverse_identity(n);
        let ic = match inertia_congruence(&r, HermitianKind::Hermitian) {
            Ok(ic) => ic,
            Err(e) => return (false, format!("n={n}: {e}")),
        };
        if (ic.n_plus, ic.n_minus) != (n.div_ceil(2), n / 2) {
            return (
                false,
                format!("n={n}: inertia ({}, {})", ic.n_plus, ic.n_minus),
            );
        }
        let res = (&(&ic.q.h() * &r) * &ic.q).dist(&ic.signature_matrix(HermitianKind::Hermitian));
        worst = worst.max(res);
    }
    (
        worst <= 1e-10,
        format!("inertia exact, max congruence residual {worst:.2e}"),
    )
}

fn c8_witness() -> Outcome {
    let mut worst_comm = 0.0f64;
    let mut smallest_gap = f64::INFINITY;
    for seed in 0..100u64 {
        let n = 1 + (seed as usize % 8);
        let route = if seed % 2 == 0 {
            NormalRoute::Polynomial
        } else {
            NormalRoute::XForm
        };
        let a =
            random_structured(&GeneratorSpec::new(ClassKind::RNormal, n, seed).with_route(route))
                .unwrap();
        let b = ScalarProduct::perplectic(n);
        let m = match commuting_distinct_witness_seeded(&a, &b, None, seed) {
            Ok(m) => m,
            Err(e) => return (false, format!("n={n} seed={seed}: {e}")),
        };
        let star = adjoint_star(&a, &b).unwrap();
        let scale = a.norm_fro().max(1.0) * m.norm_fro().max(1.0);
        worst_comm = worst_comm
            .max((&m * &a - &a * &m).norm_fro() / scale)
            .max((&m * &star - &star * &m).norm_fro() / scale);
        smallest_gap = smallest_gap.min(min_gap(&eig_default(&m).unwrap().values));
    }
    (
        worst_comm <= 1e-8 && smallest_gap >= 1e-6,
        format!("max relative commutator {worst_comm:.2e}, min eigenvalue gap {smallest_gap:.2e}"),
    )
}

fn c9_perturbation() -> Outcome {
    let eps = 1e-4;
    let mut worst_dist = 0.0f64;
    let mut worst_norm = 0.0f64;
    let mut min_gap_seen = f64::INFINITY;
    let mut max_draws = 0;
    for kind in [ClassKind::RNormal, ClassKind::JNormal] {
        for seed in 0..100u64 {
            let mut rng = rng_for(seed, 9);
            let n = match kind {
                ClassKind::JNormal => 2 * rng.random_range(1..=4),
                _ => rng.random_range(2..=8),
            };
            let mut spectrum: Vec<C64> = (0..n - 1).map(|_| normal_c64(&mut rng)).collect();
            spectrum.push(spectrum[0]);
            let a = random_structured(&GeneratorSpec::new(kind, n, seed).with_spectrum(spectrum))
                .unwrap();
            let b = product_for(kind, n).unwrap();
            let cert = match perturb_to_distinct(&a, &b, eps, seed) {
                Ok(c) => c,
                Err(e) => return (false, format!("{} n={n} seed={seed}: {e}", kind.name())),
            };
            let gap = min_gap(&eig_default(&cert.a_hat).unwrap().values);
            worst_dist = worst_dist.max((&a - &cert.a_hat).norm_fro());
            worst_norm = worst_norm.max(cert.normality_residual);
            min_gap_seen = min_gap_seen.min(gap);
            max_draws = max_draws.max(cert.draws);
        }
    }
    (
        worst_dist < eps && min_gap_seen >= 1e-6 && worst_norm <= 1e-8 && max_draws <= 32,
        format!(
            "200 cases, max distance {worst_dist:.2e}, min gap {min_gap_seen:.2e}, \
             max normality {worst_norm:.2e}, max draws {max_draws}"
        ),
    )
}

fn c10_discriminant() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = rng_for(seed, 10);
        let n = rng.random_range(1..=6);
        let a = gaussian_matrix(&mut rng, n, n);
        let ev = eig_default(&a).unwrap().values;
        let mut p = c64(1.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                p *= (ev[i] - ev[j]).powi(2);
            }
        }
        worst = worst.max((discriminant(&a).unwrap() - p).norm() / p.norm());
    }
    for n in 2..=8 {
        for lambda in [-2.0, 0.0, 1.0, 3.0] {
            let j = Matrix::from_fn(n, n, |i, k| {
                if i == k {
                    c64(lambda, 0.0)
                } else if k == i + 1 {
                    c64(1.0, 0.0)
                } else {
                    c64(0.0, 0.0)
                }
            });
            let d = discriminant(&j).unwrap();
            if d != c64(0.0, 0.0) {
                return (false, format!("Jordan block n={n} λ={lambda}: {d}"));
            }
        }
    }
    (
        worst <= 1e-6,
        format!("max relative error {worst:.2e}, Jordan blocks exactly 0"),
    )
}

fn c11_eigen_kernel() -> Outcome {
    let mut worst_schur = 0.0f64;
    let mut worst_eig = 0.0f64;
    for seed in 0..24u64 {
        let mut rng = rng_for(seed, 11);
        let n = if seed < 4 {
            64
        } else {
            rng.random_range(1..=64)
        };
        let a = gaussian_matrix(&mut rng, n, n);
        let na = a.norm_fro().max(1.0);
        let s = match schur(&a, default_max_iter(n)) {
            Ok(s) => s,
            Err(e) => return (false, format!("n={n}: {e}")),
        };
        worst_schur = worst_schur
            .max((&(&s.q * &s.t) * &s.q.h()).dist(&a) / na)
            .max((&s.q.h() * &s.q).dist(&Matrix::identity(n)) / na);
        let e = eig_default(&a).unwrap();
        for (k, &l) in e.values.iter().enumerate() {
            let v = Matrix::from_fn(n, 1, |i, _| e.vectors[(i, k)]);
            worst_eig = worst_eig.max((&(&a * &v) - &v.scale(l)).norm_fro() / na);
        }
    }
    (
        worst_schur <= 1e-12 && worst_eig <= 1e-10,
        format!("Schur {worst_schur:.2e}, eigenpairs {worst_eig:.2e}"),
    )
}

fn c12_class_transport() -> Outcome {
    for kind in ClassKind::ALL {
        let n = 4;
        let a = random_structured(&GeneratorSpec::new(kind, n, 12)).unwrap();
        let b = product_for(kind, n).unwrap();
        let before = classify(&a, &b, 1e-10).unwrap().flags();
        if !before[kind.flag_index()] {
            return (
                false,
                format!("{}: generator output not in class", kind.name()),
            );
        }
        let group = if kind.is_symplectic_side() {
            ClassKind::Symplectic
        } else {
            ClassKind::Perplectic
        };
        for t in 0..50u64 {
            let s = random_structured(&GeneratorSpec::new(group, n, 1000 + t)).unwrap();
            let c = s.similarity(&a).unwrap();
            let after = classify(&c, &b, 1e-10).unwrap().flags();
            if after != before {
                return (
                    false,
                    format!("{} transform {t}: {before:?} -> {after:?}", kind.name()),
                );
            }
        }
    }
    (true, "8 classes x 50 similarities, flags unchanged".into())
}

fn run_cli(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_canonform"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run canonform")
        .status
        .code()
        .unwrap_or(-1)
}

fn c13_cli() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut codes = Vec::new();
    codes.push(run_cli(
        d,
        &[
            "gen", "--class", "r-normal", "--dim", "6", "--seed", "7", "--out", "a.mtx",
        ],
    ));
    codes.push(run_cli(
        d,
        &[
            "reduce",
            "--product",
            "perplectic",
            "--in",
            "a.mtx",
            "--out-form",
            "x.mtx",
            "--out-transform",
            "p.mtx",
        ],
    ));
    codes.push(run_cli(
        d,
        &[
            "verify",
            "--in",
            "a.mtx",
            "--transform",
            "p.mtx",
            "--canonical",
            "x.mtx",
            "--product",
            "perplectic",
            "--pattern",
            "x",
        ],
    ));
    std::fs::write(
        d.join("j.mtx"),
        "%%MatrixMarket matrix array complex general\n2 2\n1 0\n0 0\n1 0\n1 0\n",
    )
    .unwrap();
    let jordan = run_cli(
        d,
        &[
            "reduce",
            "--product",
            "perplectic",
            "--in",
            "j.mtx",
            "--out-form",
            "xj.mtx",
            "--out-transform",
            "pj.mtx",
        ],
    );
    let text = std::fs::read_to_string(d.join("p.mtx")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut parts: Vec<f64> = lines[2]
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    parts[0] += 1e-2;
    lines[2] = format!("{:.16e} {:.16e}", parts[0], parts[1]);
    std::fs::write(d.join("p_bad.mtx"), lines.join("\n") + "\n").unwrap();
    let corrupted = run_cli(
        d,
        &[
            "verify",
            "--in",
            "a.mtx",
            "--transform",
            "p_bad.mtx",
            "--canonical",
            "x.mtx",
            "--product",
            "perplectic",
            "--pattern",
            "x",
        ],
    );
    (
        codes == [0, 0, 0] && jordan == 2 && corrupted == 1,
        format!(
            "gen/reduce/verify {codes:?}, Jordan block {jordan}, corrupted transform {corrupted}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("structural identities", c1_identities),
        ("perplectic-sum algebra", c2_perplectic_sum_algebra),
        ("R-normal to X-form", || {
            verify_pipeline(ClassKind::RNormal, &[2, 3, 4, 5, 6, 7, 8, 9, 10])
        }),
        ("J-normal to four-diagonal", || {
            verify_pipeline(ClassKind::JNormal, &[2, 4, 6, 8, 10])
        }),
        ("stage contracts", c5_stage_contracts),
        ("per-Hermitian spectrum pairing", c6_spectrum_pairing),
        ("inertia of R", c7_inertia),
        ("commuting witness", c8_witness),
        ("perturbation to distinct eigenvalues", c9_perturbation),
        ("discriminant", c10_discriminant),
        ("eigen kernel", c11_eigen_kernel),
        ("class transport", c12_class_transport),
        ("command line round trip", c13_cli),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (ok, detail) = f();
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
        if !ok {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
