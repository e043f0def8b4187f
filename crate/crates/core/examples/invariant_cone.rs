//! The generic engine on a user-supplied cone: a map that sends the
//! ice-cream cone `{x : x₀ ≥ ‖(x₁, x₂)‖}` into itself.

use cone_spectra::birkhoff::{birkhoff_eigenvector, ConeHandle, EngineOptions};
use cone_spectra::linalg::{vector, Matrix};

struct IceCream;

impl ConeHandle for IceCream {
    fn space_dim(&self) -> usize {
        3
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x[0] + tol * vector::norm(x) >= x[1].hypot(x[2])
    }

    fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        (x[0] > 0.0).then(|| vector::scaled(x, 1.0 / x[0]))
    }

    fn interior_seed(&self) -> Vec<f64> {
        vec![1.0, 0.0, 0.0]
    }
}

fn main() -> cone_spectra::Result<()> {
    // a Lorentz boost followed by a rotation of the spatial part
    let (ch, sh) = (0.5f64.cosh(), 0.5f64.sinh());
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let boost = Matrix::from_rows(&[vec![ch, sh, 0.0], vec![sh, ch, 0.0], vec![0.0, 0.0, 1.0]])?;
    let rot = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, c, -s], vec![0.0, s, c]])?;
    let t = rot.matmul(&boost);
    let fp = birkhoff_eigenvector(&t, &IceCream, &EngineOptions::default())?;
    println!("eigenvalue {:.12}", fp.eigenvalue);
    println!("vector     {:?}", fp.vector);
    println!("residual   {:.2e} after {} steps", fp.residual, fp.iterations);
    Ok(())
}
