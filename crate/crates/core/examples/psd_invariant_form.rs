//! A PSD form `S` with `uᵀSu = λS` for a matrix with no real structure.

use cone_spectra::birkhoff::{congruence_action, psd_invariant_form, EngineOptions};
use cone_spectra::linalg::Matrix;
use cone_spectra::oracle::psd_check;

fn main() -> cone_spectra::Result<()> {
    let u = Matrix::from_rows(&[
        vec![0.0, -1.0, 0.5],
        vec![1.0, 0.2, 0.0],
        vec![-0.3, 0.4, 0.7],
    ])?;
    let f = psd_invariant_form(&u, &EngineOptions::default())?;
    let s = &f.form;
    let defect = congruence_action(s, &u).sub(&s.scaled(f.eigenvalue)).frobenius_norm();
    println!("lambda {:.12}", f.eigenvalue);
    println!("S =\n{}", s.as_matrix());
    println!("|u'Su - lambda S| = {defect:.2e}, trace {:.15}", s.trace());
    println!("smallest eigenvalue of S >= {:.2e}", psd_check(s)?.min_eig_bound);
    Ok(())
}
