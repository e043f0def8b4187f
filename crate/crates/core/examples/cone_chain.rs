//! The chain `C ⊇ v(C) ⊇ v²(C) ⊇ …` for `v = I + A`, and the eigenvector
//! behind the ray it collapses to.

use cone_spectra::birkhoff::extremal_decomposition_check;
use cone_spectra::cones::{chain_iterate, extremal_rays, PolyhedralCone};
use cone_spectra::linalg::Matrix;

fn main() -> cone_spectra::Result<()> {
    let a = Matrix::from_rows(&[vec![1.0, 2.0, 0.5], vec![0.5, 1.0, 1.0], vec![1.0, 0.2, 2.0]])?;
    let ch = chain_iterate(&a.shifted(1.0), &PolyhedralCone::orthant(3), 60)?;
    for (k, s) in ch.steps.iter().enumerate().step_by(10) {
        println!("step {:>2}: gap {:.3e}, nested {}", k + 1, s.gap, s.nested);
    }
    let n = ch.cones.len();
    let (prev, last) = (&ch.cones[n - 2], &ch.cones[n - 1]);
    for x in extremal_rays(last)? {
        let dec = extremal_decomposition_check(&a, prev, &x, 1e-6)?;
        println!("ray {x:?}: A y = {:.10} y (sine {:.1e})", dec.ratio, dec.sine);
    }
    Ok(())
}
