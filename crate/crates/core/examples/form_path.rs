//! The eigenvalue certificate through forms for a matrix that is
//! self-adjoint under a metric other than the identity.

use cone_spectra::linalg::{Matrix, SymmetricMatrix};
use cone_spectra::spectral::{commutant_selfadjoint_basis, invariant_form_path, SpectralOptions};

fn main() -> cone_spectra::Result<()> {
    // u = G⁻¹ A with G, A symmetric: G u = A is symmetric
    let g = SymmetricMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]])?;
    let a = Matrix::from_rows(&[vec![1.0, 3.0], vec![3.0, -2.0]])?;
    let u = cone_spectra::linalg::inverse(g.as_matrix())?.matmul(&a);
    let cert = invariant_form_path(&u, &g, &SpectralOptions::default())?;
    println!("eigenvalue   {:.12}", cert.certificate.eigenvalue);
    println!("radical dim  {}", cert.radical_dim);
    println!("radical defect {:.2e}", cert.radical_defect);

    let sym = SymmetricMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]])?;
    println!("commutant of I has dimension {}", commutant_selfadjoint_basis(&sym).len());
    Ok(())
}
