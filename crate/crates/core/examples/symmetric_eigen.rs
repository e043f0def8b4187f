//! Eigenvalues of a symmetric matrix, certified and then all of them.

use cone_spectra::linalg::SymmetricMatrix;
use cone_spectra::oracle::symmetric_spectrum_oracle;
use cone_spectra::spectral::{eigen_decomposition, spectral_eigenvalue, SpectralOptions};

fn main() -> cone_spectra::Result<()> {
    let u = SymmetricMatrix::from_rows(&[
        vec![4.0, 1.0, -2.0, 2.0],
        vec![1.0, 2.0, 0.0, 1.0],
        vec![-2.0, 0.0, 3.0, -2.0],
        vec![2.0, 1.0, -2.0, -1.0],
    ])?;
    let opts = SpectralOptions::default();

    let c = spectral_eigenvalue(&u, &opts)?;
    println!("eigenvalue {:.12} (lambda for u^2: {:.12})", c.eigenvalue, c.lambda_sq);
    println!(
        "sigma_min(u - mu) = {:.2e}, sigma_min(u + mu) = {:.2e}",
        c.sigma_min_minus, c.sigma_min_plus
    );

    let dec = eigen_decomposition(&u, &opts)?;
    println!("all eigenvalues {:?}", dec.eigenvalues);
    println!("reconstruction error {:.2e}", dec.reconstruction_error(&u));
    println!("oracle spectrum {:?}", symmetric_spectrum_oracle(&u)?);
    Ok(())
}
