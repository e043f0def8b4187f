use super::vector::{dot_compensated, sum_compensated};
use super::Matrix;
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Largest dimension accepted by [`char_poly`].
pub const CHAR_POLY_MAX_DIM: usize = 64;

/// `det(tI − A)` by the Faddeev–LeVerrier recurrence
///
/// ```text
/// M_1 = I,  c_{n-1} = −tr(A)
/// M_k = A M_{k−1} + c_{n−k+1} I,  c_{n−k} = −tr(A M_k) / k
/// ```
///
/// with compensated dot products and traces.
pub fn char_poly(a: &Matrix) -> Result<Polynomial> {
    let n = a.dim();
    if n > CHAR_POLY_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: CHAR_POLY_MAX_DIM,
        });
    }
    // coeffs[k] multiplies t^k
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        // A M
        let mut am = vec![0.0; n * n];
        for i in 0..n {
            let arow = a.row(i);
            for j in 0..n {
                let mcol = (0..n).map(|r| m[(r, j)]);
                am[i * n + j] = dot_compensated(arow.iter().copied(), mcol);
            }
        }
        let trace = sum_compensated((0..n).map(|i| am[i * n + i]));
        let c = -trace / k as f64;
        coeffs[n - k] = c;
        if k < n {
            for i in 0..n {
                am[i * n + i] += c;
            }
            m = Matrix::from_raw(n, am);
        }
    }
    Ok(Polynomial::new(coeffs))
}
