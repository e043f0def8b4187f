//! Perron vector of a nonnegative matrix with its Collatz–Wielandt bracket.

use cone_spectra::birkhoff::{perron_frobenius, EngineOptions};
use cone_spectra::linalg::Matrix;

fn main() -> cone_spectra::Result<()> {
    let a = Matrix::from_rows(&[
        vec![0.0, 2.0, 1.0],
        vec![1.0, 0.0, 3.0],
        vec![2.0, 1.0, 0.0],
    ])?;
    let r = perron_frobenius(&a, &EngineOptions::default())?;
    println!("lambda   {:.12}", r.fixed_point.eigenvalue);
    println!("vector   {:?}", r.fixed_point.vector);
    println!("bracket  [{:.12}, {:.12}]", r.bracket[0], r.bracket[1]);
    println!("steps    {}", r.fixed_point.iterations);
    Ok(())
}
