//! Which branch of the splitting step handled each piece.

use cone_spectra::poly::Polynomial;
use cone_spectra::polyfactor::{companion_matrix, factor_completely_traced, FactorOptions};

fn main() -> cone_spectra::Result<()> {
    let p = Polynomial::from_roots(&[-1.5, 0.5, 2.0]);
    let q = &Polynomial::quadratic(0.4, 1.3) * &Polynomial::quadratic(-1.0, 2.5);
    let p = &p * &q;
    println!("companion matrix of {p}:\n{}", companion_matrix(&p)?);

    let (fl, trace) = factor_completely_traced(&p, &FactorOptions::default())?;
    for s in &trace.splits {
        println!(
            "degree {:>2}  {:?}  lambda {}{}",
            s.degree,
            s.branch,
            s.lambda.map_or("-".into(), |l| format!("{l:.6}")),
            s.isometry_defect
                .map(|d| format!("  isometry defect {d:.1e}"))
                .unwrap_or_default()
        );
    }
    println!("retried attempts: {}", trace.discarded.len());
    println!("{fl}");
    Ok(())
}
