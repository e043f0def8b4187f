use std::process::Command;

use cone_spectra::birkhoff::PerronResult;
use cone_spectra::cli::run;
use cone_spectra::cones::{ConeChain, PolyhedralCone, SeparatingFunctional};
use cone_spectra::poly::Polynomial;
use cone_spectra::polyfactor::{FactorList, RootReport};
use cone_spectra::spectral::{EigenDecomposition, SpectralCertificate};
use serde::de::DeserializeOwned;
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cone-spectra").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = cli(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    out
}

/// Parses the output as `T` and checks that printing it again reproduces
/// the same JSON value.
fn round_trip<T: DeserializeOwned + serde::Serialize>(out: &str) -> T {
    let v: Value = serde_json::from_str(out).unwrap();
    let t: T = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&t).unwrap(), v);
    t
}

#[test]
fn eig_certificate() {
    let c: SpectralCertificate = round_trip(&ok(&["eig", "[[2,1],[1,2]]"]));
    assert!((c.eigenvalue - 3.0).abs() < 1e-9);
}

#[test]
fn eig_all_on_diagonal() {
    let d: EigenDecomposition = round_trip(&ok(&["eig", "--all", "[[1,0,0],[0,2,0],[0,0,3]]"]));
    let mut ev = d.eigenvalues.clone();
    ev.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip([1.0, 2.0, 3.0]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn eig_rejects_asymmetric_input() {
    let (code, _, err) = cli(&["eig", "[[1,2],[0,1]]"]);
    assert_eq!(code, 1);
    assert!(err.contains("matrix not symmetric"), "{err}");
}

#[test]
fn eig_accepts_whitespace_grid_and_files() {
    let dir = std::env::temp_dir().join(format!("cone-spectra-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.txt");
    std::fs::write(&path, "2 1\n1 2\n").unwrap();
    let arg = format!("@{}", path.display());
    let c: SpectralCertificate = round_trip(&ok(&["eig", &arg]));
    assert!((c.eigenvalue - 3.0).abs() < 1e-9);
}

#[test]
fn eig_verify_appends_oracle_block() {
    let v: Value = serde_json::from_str(&ok(&["eig", "--verify", "[[2,1],[1,2]]"])).unwrap();
    assert!(v["verification"]["max_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["verification"]["oracle_spectrum"].as_array().unwrap().len(), 2);
}

#[test]
fn roots_of_t2_plus_1() {
    let r: RootReport = round_trip(&ok(&["roots", "1,0,1"]));
    assert!(r.real.is_empty());
    assert_eq!(r.pairs.len(), 1);
    assert!(r.pairs[0].re.abs() < 1e-12 && (r.pairs[0].im - 1.0).abs() < 1e-12);
}

#[test]
fn factor_t3_minus_1() {
    let fl: FactorList = round_trip(&ok(&["factor", "-1,0,0,1"]));
    let p = Polynomial::new(vec![-1.0, 0.0, 0.0, 1.0]);
    let e = fl.expand();
    for k in 0..=3 {
        assert!((e.coeff(k) - p.coeff(k)).abs() < 1e-12);
    }
    let degrees: Vec<usize> = fl.factors.iter().map(|f| f.coeffs.degree()).collect();
    assert_eq!(degrees, vec![1, 2]);
    let text = ok(&["factor", "--format", "text", "-1,0,0,1"]);
    assert_eq!(text.trim(), "(t - 1.000000)(t^2 + 1.000000t + 1.000000)");
}

#[test]
fn factor_t4_plus_1() {
    let fl: FactorList = round_trip(&ok(&["factor", "1,0,0,0,1"]));
    assert_eq!(fl.factors.len(), 2);
    let mids: Vec<f64> = fl.factors.iter().map(|f| f.coeffs.coeff(1)).collect();
    assert!((mids[0] + 2f64.sqrt()).abs() < 1e-9);
    assert!((mids[1] - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn factor_verify_reports_deviation() {
    let v: Value = serde_json::from_str(&ok(&["factor", "--verify", "2,-3,1"])).unwrap();
    assert!(v["verification"]["deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn pf_examples() {
    let r: PerronResult = round_trip(&ok(&["pf", "[[0,1],[1,0]]"]));
    assert!((r.fixed_point.eigenvalue - 1.0).abs() < 1e-9);
    for x in &r.fixed_point.vector {
        assert!((x - 0.5f64.sqrt()).abs() < 1e-6);
    }
    let r: PerronResult = round_trip(&ok(&["pf", "[[1,2],[3,4]]"]));
    assert!((r.fixed_point.eigenvalue - (5.0 + 33f64.sqrt()) / 2.0).abs() < 1e-8);
    let r: PerronResult = round_trip(&ok(&["pf", "[[0,0],[0,0]]"]));
    assert_eq!(r.fixed_point.eigenvalue, 0.0);
    let (code, _, _) = cli(&["pf", "[[0,-1],[1,0]]"]);
    assert_eq!(code, 1);
}

#[test]
fn cone_subcommands() {
    let orthant = r#"{"dim":3,"generators":[[1,0,0],[0,1,0],[0,0,1]]}"#;
    let d: PolyhedralCone = round_trip(&ok(&["cone", "dual", orthant]));
    assert!(d.same_set(&PolyhedralCone::orthant(3), 1e-9));

    let c = r#"{"dim":2,"generators":[[1,0],[0,1],[1,1]]}"#;
    let e: PolyhedralCone = round_trip(&ok(&["cone", "extremal", c]));
    assert_eq!(e.generators().len(), 2);

    let q = r#"{"dim":2,"generators":[[1,0],[0,1]]}"#;
    let f: SeparatingFunctional = round_trip(&ok(&["cone", "separate", q, "--point", "[-1,-1]"]));
    assert!(f.eval(&[-1.0, -1.0]) < 0.0);

    let ch: ConeChain = round_trip(&ok(&["cone", "chain", q, "--op", "[[2,1],[1,2]]", "--n", "30"]));
    assert_eq!(ch.cones.len(), 31);
    let last = ch.last().generators();
    let h = 0.5f64.sqrt();
    assert!(last.iter().all(|g| (g[0] - h).abs() < 1e-9 && (g[1] - h).abs() < 1e-9));
}

#[test]
fn malformed_inputs_exit_1() {
    for args in [
        vec!["factor", "1,x,2"],
        vec!["factor", "5"],
        vec!["eig", "[[1,2],[3"],
        vec!["eig", "[[1,2,3],[4,5,6]]"],
        vec!["cone", "dual", "{\"dim\":2}"],
        vec!["cone", "separate", r#"{"dim":2,"generators":[[1,0]]}"#, "--point", "[2,0]"],
        vec!["eig", "[[1]]", "--tol", "-1"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = cli(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn non_convergence_exits_2() {
    let (code, _, err) = cli(&["pf", "--max-iter", "2", "[[1,2],[3,4]]"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn batch_mode_keeps_line_order() {
    let dir = std::env::temp_dir().join(format!("cone-spectra-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("polys.txt");
    std::fs::write(&path, "1,0,1\n# comment\n\n-1,0,0,1\nnope\n").unwrap();
    let (code, out, _) = cli(&["factor", "--batch", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    let first: FactorList = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first.factors.len(), 1);
    let second: FactorList = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(second.factors.len(), 2);
    assert!(lines[2].contains("\"line\":5"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["factor", "1,2,3,4,5,6,7"],
        vec!["eig", "--all", "[[4,1,0],[1,3,1],[0,1,2]]"],
        vec!["pf", "--perturb-seed", "7", "[[1,2],[3,4]]"],
    ] {
        assert_eq!(ok(&args), ok(&args));
    }
}

#[test]
fn tolerance_from_environment_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_cone-spectra"))
        .args(["roots", "1,0,1"])
        .env("CONE_SPECTRA_TOL", "1e-9")
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: RootReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.pairs.len(), 1);

    let out = Command::new(env!("CARGO_BIN_EXE_cone-spectra"))
        .args(["eig", "[[1,2],[0,1]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
