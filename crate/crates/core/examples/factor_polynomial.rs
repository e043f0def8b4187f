//! Real factorization and roots. Coefficients are ascending: `a₀ + a₁t + …`.

use cone_spectra::oracle::verify_factorization;
use cone_spectra::poly::Polynomial;
use cone_spectra::polyfactor::{factor_completely, roots_of, FactorOptions};

fn main() -> cone_spectra::Result<()> {
    let cases = [
        vec![-1.0, 0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0, 0.0, 1.0],
        vec![6.0, -5.0, -2.0, 1.0, 3.0, 1.0],
        // (t² + 1)²(t − 2)
        vec![-2.0, 1.0, -4.0, 2.0, -2.0, 1.0],
    ];
    for c in cases {
        let p = Polynomial::new(c);
        let fl = factor_completely(&p, &FactorOptions::default())?;
        let check = verify_factorization(&p, &fl);
        println!("{p}\n  = {fl}\n  deviation {:.1e}", check.deviation);
        let r = roots_of(&fl);
        for x in &r.real {
            println!("  real {:.12} x{}", x.value, x.multiplicity);
        }
        for z in &r.pairs {
            println!("  pair {:.12} ± {:.12}i x{}", z.re, z.im, z.multiplicity);
        }
    }
    Ok(())
}
