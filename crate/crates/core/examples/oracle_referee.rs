//! The independent checks: Sturm isolation, expansion, PSD test and the
//! 2×2 brute-force enumeration of congruence fixed points.

use cone_spectra::linalg::{Matrix, SymmetricMatrix};
use cone_spectra::oracle::{brute_force_cone_fixed_points, psd_check, sturm_isolate};
use cone_spectra::poly::Polynomial;

fn main() -> cone_spectra::Result<()> {
    let p = Polynomial::new(vec![1.0, -3.0, 0.0, 1.0]);
    for b in sturm_isolate(&p, -2.0, 2.0)? {
        println!("root {:.15} in [{}, {}]", b.refined_root, b.lo, b.hi);
    }

    let s = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]])?;
    println!("{:?}", psd_check(&s)?);

    let u = Matrix::from_diagonal(&[2.0, 1.0]);
    for fp in brute_force_cone_fixed_points(&u)? {
        println!(
            "lambda {} eigenspace dim {} form {:?}",
            fp.eigenvalue,
            fp.eigenspace.len(),
            fp.psd_form.map(|f| f.as_matrix().rows())
        );
    }
    Ok(())
}
