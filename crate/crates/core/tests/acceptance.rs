//! Acceptance suite: seven criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.

use std::time::Instant;

use cone_spectra::birkhoff::{
    congruence_action, extremal_decomposition_check, perron_frobenius, psd_invariant_form,
    EngineOptions,
};
use cone_spectra::cones::{
    chain_iterate, double_dual_check, dual_cone, extremal_rays, separate, PolyhedralCone, CONE_TOL,
};
use cone_spectra::linalg::{char_poly, cholesky, min_singular_value, vector, Matrix, SymmetricMatrix};
use cone_spectra::oracle::{
    brute_force_cone_fixed_points, psd_check, real_roots_with_multiplicity, sturm_isolate,
    symmetric_spectrum_oracle, verify_factorization, ORACLE_MAX_DIM,
};
use cone_spectra::poly::Polynomial;
use cone_spectra::polyfactor::{factor_completely_traced, roots_of, Branch, FactorOptions, FactorTrace};
use cone_spectra::spectral::{spectral_eigenvalue, SpectralOptions};
use cone_spectra::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    summary: String,
}

/// Everything a criterion printed as JSON, for the determinism check.
type Transcript = Vec<String>;

fn json<T: serde::Serialize>(t: &T) -> String {
    serde_json::to_string(t).expect("serializable")
}

fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> SymmetricMatrix {
    let mut rows = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let v = rng.gen_range(-1.0..=1.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SymmetricMatrix::from_rows(&rows).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

/// Monic product of known factors: roots in the annulus `0.2 ≤ |z| ≤ 3`,
/// pairwise at least 0.1 apart (a conjugate pair included).
fn random_polynomial(rng: &mut ChaCha8Rng) -> Polynomial {
    let d: usize = rng.gen_range(1..=12);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut p = Polynomial::one();
    while pts.len() < d {
        let pair = d - pts.len() >= 2 && rng.gen_bool(0.5);
        let r = rng.gen_range(0.2..=3.0);
        let z = if pair {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            (r * th.cos(), r * th.sin())
        } else if rng.gen_bool(0.5) {
            (r, 0.0)
        } else {
            (-r, 0.0)
        };
        if pair && 2.0 * z.1 < 0.1 {
            continue;
        }
        let new = if pair { vec![z, (z.0, -z.1)] } else { vec![z] };
        let close = new
            .iter()
            .any(|c| pts.iter().any(|q| (c.0 - q.0).hypot(c.1 - q.1) < 0.1));
        if close {
            continue;
        }
        pts.extend(&new);
        p = if pair {
            &p * &Polynomial::quadratic(-2.0 * z.0, z.0 * z.0 + z.1 * z.1)
        } else {
            &p * &Polynomial::linear(z.0)
        };
    }
    p
}

fn criterion_1(log: &mut Transcript) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let opts = SpectralOptions::default();
    let (mut failures, mut nonconv, mut worst) = (0, 0, 0.0f64);
    let n = 500;
    for _ in 0..n {
        let d = rng.gen_range(2..=8);
        let u = random_symmetric(&mut rng, d);
        let scale = 1.0 + u.as_matrix().inf_norm();
        let cert = match spectral_eigenvalue(&u, &opts) {
            Ok(c) => c,
            Err(e) if matches!(e.root(), Error::NonConvergence { .. }) => {
                nonconv += 1;
                log.push("nonconvergence".into());
                continue;
            }
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        log.push(json(&cert));
        let mu = cert.eigenvalue;
        let dist = match symmetric_spectrum_oracle(&u) {
            Ok(spec) => spec.iter().map(|s| (s - mu).abs()).fold(f64::INFINITY, f64::min),
            Err(_) => f64::INFINITY,
        };
        let sigma = min_singular_value(&u.as_matrix().shifted(-mu));
        let err = dist.max(sigma) / scale;
        worst = worst.max(err);
        if err > 1e-7 {
            failures += 1;
        }
    }
    let pass = failures == 0 && nonconv * 100 <= n;
    Outcome {
        pass,
        summary: format!(
            "{n} symmetric matrices, {failures} failures, {nonconv} non-convergent, worst scaled error {worst:.1e}"
        ),
    }
}

fn criterion_2(log: &mut Transcript, traces: &mut Vec<(usize, FactorTrace)>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let opts = FactorOptions::default();
    let (mut failures, mut worst_dev, mut worst_root) = (0, 0.0f64, 0.0f64);
    let n = 300;
    for _ in 0..n {
        let p = random_polynomial(&mut rng);
        let (fl, trace) = match factor_completely_traced(&p, &opts) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("criterion 2: {e} on {:?}", p.coeffs());
                log.push(format!("error {e}"));
                failures += 1;
                continue;
            }
        };
        log.push(json(&fl));
        traces.push((p.degree(), trace));
        let report = verify_factorization(&p, &fl);
        worst_dev = worst_dev.max(report.deviation);
        let mut ok = report.passes(1e-8);
        let b = p.cauchy_bound();
        match sturm_isolate(&p, -b, b) {
            Ok(brackets) => {
                let rr = roots_of(&fl);
                ok &= brackets.len() == rr.real.len();
                for br in &brackets {
                    let gap = rr
                        .real
                        .iter()
                        .map(|r| (r.value - br.refined_root).abs())
                        .fold(f64::INFINITY, f64::min);
                    worst_root = worst_root.max(gap);
                    ok &= gap <= 1e-8;
                }
            }
            Err(_) => ok = false,
        }
        if !ok {
            eprintln!("criterion 2: failed on {:?}: {report:?}", p.coeffs());
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        summary: format!(
            "{n} polynomials, {failures} failures, worst coefficient deviation {worst_dev:.1e}, worst root gap {worst_root:.1e}"
        ),
    }
}

fn criterion_3(log: &mut Transcript) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    // Dominant complex pairs make the PSD iteration creep; the default
    // budget is too small for a zero-failure run.
    let opts = EngineOptions {
        max_iter: 1_000_000,
        ..EngineOptions::default()
    };
    let (mut failures, mut worst_res, mut brute) = (0, 0.0f64, 0);
    let n = 300;
    for _ in 0..n {
        let d = rng.gen_range(1..=6);
        let u = random_matrix(&mut rng, d, -1.0, 1.0);
        let f = match psd_invariant_form(&u, &opts) {
            Ok(f) => f,
            Err(e) => {
                log.push(format!("error {e}"));
                failures += 1;
                continue;
            }
        };
        log.push(json(&f));
        let s = &f.form;
        let res = congruence_action(s, &u).sub(&s.scaled(f.eigenvalue)).frobenius_norm();
        worst_res = worst_res.max(res);
        let mut ok = res <= 1e-9 && (s.trace() - 1.0).abs() <= 1e-12;
        ok &= psd_check(s).map(|c| c.min_eig_bound >= -1e-9).unwrap_or(false);
        if d == 2 {
            brute += 1;
            let fps = brute_force_cone_fixed_points(&u).unwrap_or_default();
            ok &= fps
                .iter()
                .any(|fp| (fp.eigenvalue - f.eigenvalue).abs() <= 1e-7 && fp.distance(s) <= 1e-7);
        }
        if !ok {
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        summary: format!(
            "{n} matrices ({brute} brute-forced at d = 2), {failures} failures, worst residual {worst_res:.1e}"
        ),
    }
}

fn criterion_4(log: &mut Transcript) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let opts = EngineOptions::default();
    let (mut failures, mut worst_width, mut worst_gap) = (0, 0.0f64, 0.0f64);
    let n = 200;
    for _ in 0..n {
        let d = rng.gen_range(1..=10);
        let a = random_matrix(&mut rng, d, 0.01, 1.0);
        let r = match perron_frobenius(&a, &opts) {
            Ok(r) => r,
            Err(e) => {
                log.push(format!("error {e}"));
                failures += 1;
                continue;
            }
        };
        log.push(json(&r));
        let lambda = r.fixed_point.eigenvalue;
        let width = (r.bracket[1] - r.bracket[0]) / lambda;
        let top = char_poly(&a)
            .ok()
            .and_then(|c| real_roots_with_multiplicity(&c).ok())
            .and_then(|rs| rs.last().map(|x| x.0));
        let gap = top.map_or(f64::INFINITY, |t| (t - lambda).abs());
        worst_width = worst_width.max(width);
        worst_gap = worst_gap.max(gap);
        if width > 1e-8 || gap > 1e-7 {
            eprintln!("criterion 4: width {width:e} gap {gap:e} on {:?}", a.rows());
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        summary: format!(
            "{n} positive matrices, {failures} failures, worst relative bracket {worst_width:.1e}, worst oracle gap {worst_gap:.1e}"
        ),
    }
}

fn random_cone(rng: &mut ChaCha8Rng) -> PolyhedralCone {
    loop {
        let d = rng.gen_range(2..=4);
        let k = rng.gen_range(2..=5);
        let gens: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        if gens.iter().any(|g| vector::norm(g) < 1e-3) {
            continue;
        }
        if let Ok(c) = PolyhedralCone::new(d, gens) {
            return c;
        }
    }
}

fn criterion_5(log: &mut Transcript) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let n = 200;
    let (mut dd_fail, mut ext_fail, mut lines, mut sep_fail, mut points) = (0, 0, 0, 0, 0);
    let (mut chain_fail, mut worst_sine) = (0, 0.0f64);
    for _ in 0..n {
        let c = random_cone(&mut rng);
        let d = c.ambient_dim();
        if !double_dual_check(&c).unwrap_or(false) {
            dd_fail += 1;
        }
        if let Ok(dual) = dual_cone(&c) {
            log.push(json(&dual));
        }
        match extremal_rays(&c) {
            Ok(rays) => {
                log.push(json(&rays));
                let ok = PolyhedralCone::new(d, rays).is_ok_and(|back| back.same_set(&c, CONE_TOL));
                if !ok {
                    ext_fail += 1;
                }
            }
            // a cone holding a line has no extremal rays
            Err(Error::DegenerateCone { .. }) => lines += 1,
            Err(_) => ext_fail += 1,
        }
        for _ in 0..50 {
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            if c.contains(&a, CONE_TOL) {
                continue;
            }
            points += 1;
            match separate(&c, &a) {
                Ok(phi) => {
                    log.push(json(&phi));
                    let ok = c.generators().iter().all(|g| phi.eval(g) >= -1e-10)
                        && phi.eval(&a) <= -1e-10 * vector::norm(&a);
                    if !ok {
                        sep_fail += 1;
                    }
                }
                Err(_) => sep_fail += 1,
            }
            break;
        }
        // nonnegative instance on the orthant of the same dimension
        let a = random_matrix(&mut rng, d, 0.01, 1.0);
        let step = a.shifted(1.0);
        match chain_iterate(&step, &PolyhedralCone::orthant(d), 80) {
            Ok(ch) => {
                log.push(json(&ch));
                let mut ok = ch.steps.iter().all(|s| s.nested);
                // x ∈ (I + A)(Cₙ₋₁) pulls back into the previous stage
                let n = ch.cones.len();
                let (prev, last) = (&ch.cones[n - 2], &ch.cones[n - 1]);
                for x in extremal_rays(last).unwrap_or_default() {
                    match extremal_decomposition_check(&a, prev, &x, 1e-6) {
                        Ok(dec) => worst_sine = worst_sine.max(dec.sine),
                        Err(e) => {
                            eprintln!("criterion 5: chain check {e} on {:?}", a.rows());
                            ok = false;
                        }
                    }
                }
                if !ok {
                    chain_fail += 1;
                }
            }
            Err(e) => {
                eprintln!("criterion 5: chain {e} on {:?}", a.rows());
                chain_fail += 1;
            }
        }
    }
    let pass = dd_fail + ext_fail + sep_fail + chain_fail == 0;
    Outcome {
        pass,
        summary: format!(
            "{n} cones: double dual {dd_fail} failures, extremal {ext_fail} failures ({lines} hold a line), separation {sep_fail}/{points} failures, chains {chain_fail} failures (worst sine {worst_sine:.1e})"
        ),
    }
}

/// Definiteness of a pipeline form: the oracle up to its size limit,
/// a Cholesky factorization beyond it.
fn positive_definite(s: &SymmetricMatrix) -> bool {
    if s.dim() <= ORACLE_MAX_DIM {
        psd_check(s).is_ok_and(|c| c.min_eig_bound > 0.0)
    } else {
        cholesky(s).is_ok()
    }
}

fn criterion_6(traces: &[(usize, FactorTrace)]) -> Outcome {
    let (mut fired, mut broken, mut late_certificates, mut inconsistent) = (0, 0, 0, 0);
    for (_, t) in traces {
        inconsistent += t.inconsistent_dimension;
        for s in &t.splits {
            if s.definite_branch() {
                fired += 1;
                let definite = s.form.as_ref().is_some_and(positive_definite);
                let isometry = s.isometry_defect.is_some_and(|x| x <= 1e-7);
                if !(definite && isometry) {
                    broken += 1;
                }
            }
            if s.branch == Branch::Certificate && s.degree >= 3 {
                late_certificates += 1;
            }
        }
    }
    Outcome {
        pass: fired > 0 && broken == 0 && late_certificates == 0 && inconsistent == 0,
        summary: format!(
            "definite branch fired {fired} times ({broken} violating invariants), certificate branch at degree >= 3: {late_certificates}, inconsistent dimension: {inconsistent}"
        ),
    }
}

fn run_all(log: &mut Transcript, traces: &mut Vec<(usize, FactorTrace)>) -> Vec<Outcome> {
    vec![
        criterion_1(log),
        criterion_2(log, traces),
        criterion_3(log),
        criterion_4(log),
        criterion_5(log),
    ]
}

fn main() {
    let start = Instant::now();
    let mut first = Transcript::new();
    let mut traces = Vec::new();
    let mut outcomes = run_all(&mut first, &mut traces);
    outcomes.push(criterion_6(&traces));

    let mut second = Transcript::new();
    run_all(&mut second, &mut Vec::new());
    let differing = first.iter().zip(&second).filter(|(a, b)| a != b).count();
    outcomes.push(Outcome {
        pass: first.len() == second.len() && differing == 0,
        summary: format!(
            "{} JSON outputs rerun, {differing} differ, lengths {} / {}",
            first.len(),
            first.len(),
            second.len()
        ),
    });

    let mut all = true;
    for (i, o) in outcomes.iter().enumerate() {
        all &= o.pass;
        println!(
            "criterion {} {}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.summary
        );
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
