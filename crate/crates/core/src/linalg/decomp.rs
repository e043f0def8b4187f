use super::matrix::Dense;
use super::{vector, Matrix, Subspace, SymmetricMatrix};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    dim: usize,
    // unit-lower L below the diagonal, U on and above, row-major
    lu: Vec<f64>,
    perm: Vec<usize>,
}

/// Default singularity threshold `dim · ε · ‖A‖∞`.
pub fn default_singular_tol(a: &Matrix) -> f64 {
    a.dim() as f64 * f64::EPSILON * a.inf_norm()
}

impl Lu {
    /// Fails with `SingularMatrix` when a pivot is at or below `singular_tol`.
    pub fn factor(a: &Matrix, singular_tol: f64) -> Result<Lu> {
        Lu::factor_impl(a, Some(singular_tol))
    }

    /// Never fails: pivots below `dim · ε · ‖A‖∞` are replaced by that value
    /// (keeping their sign). Used by inverse iteration, where an exactly
    /// singular matrix is the interesting case.
    pub(crate) fn factor_regularized(a: &Matrix) -> Lu {
        Lu::factor_impl(a, None).expect("regularized LU cannot fail")
    }

    fn factor_impl(a: &Matrix, singular_tol: Option<f64>) -> Result<Lu> {
        let d = a.dim();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..d).collect();
        let floor = (d as f64 * f64::EPSILON * a.inf_norm()).max(f64::MIN_POSITIVE);
        for k in 0..d {
            let mut p = k;
            let mut best = lu[k * d + k].abs();
            for i in (k + 1)..d {
                let v = lu[i * d + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..d {
                    lu.swap(k * d + j, p * d + j);
                }
                perm.swap(k, p);
            }
            let mut pivot = lu[k * d + k];
            match singular_tol {
                Some(tol) if pivot.abs() <= tol => {
                    return Err(Error::SingularMatrix { pivot, column: k });
                }
                None if pivot.abs() < floor => {
                    pivot = if pivot < 0.0 { -floor } else { floor };
                    lu[k * d + k] = pivot;
                }
                _ => {}
            }
            for i in (k + 1)..d {
                let f = lu[i * d + k] / pivot;
                lu[i * d + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..d {
                        lu[i * d + j] -= f * lu[k * d + j];
                    }
                }
            }
        }
        Ok(Lu { dim: d, lu, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(b.len(), d, "right-hand side dimension mismatch");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..d {
            let s: f64 = (0..i).map(|j| self.lu[i * d + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..d).rev() {
            let s: f64 = ((i + 1)..d).map(|j| self.lu[i * d + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * d + i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(b.len(), d, "right-hand side dimension mismatch");
        // Aᵀ = Uᵀ Lᵀ P
        let mut z = b.to_vec();
        for i in 0..d {
            let s: f64 = (0..i).map(|j| self.lu[j * d + i] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[i * d + i];
        }
        for i in (0..d).rev() {
            let s: f64 = ((i + 1)..d).map(|j| self.lu[j * d + i] * z[j]).sum();
            z[i] -= s;
        }
        let mut x = vec![0.0; d];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for j in 0..d {
            let col = self.solve(&vector::unit(d, j));
            for i in 0..d {
                data[i * d + j] = col[i];
            }
        }
        Matrix::from_raw(d, data)
    }
}

/// Solves `A x = b` by partial-pivoting LU with the default singularity
/// threshold.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    solve_linear_with_tol(a, b, default_singular_tol(a))
}

pub fn solve_linear_with_tol(a: &Matrix, b: &[f64], singular_tol: f64) -> Result<Vec<f64>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    Ok(Lu::factor(a, singular_tol)?.solve(b))
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Ok(Lu::factor(a, default_singular_tol(a))?.inverse())
}

/// Householder QR with column pivoting, `A Π = Q R`.
pub(crate) struct PivotedQr {
    /// full `m×m` orthogonal factor
    pub q: Dense,
    /// `|R_kk|` in pivot order, non-increasing
    pub r_diag: Vec<f64>,
}

pub(crate) fn qr_column_pivoted(mut a: Dense) -> PivotedQr {
    let m = a.rows;
    let n = a.cols;
    let steps = m.min(n);
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut r_diag = Vec::with_capacity(steps);
    for k in 0..steps {
        // lowest index wins ties
        let mut p = k;
        let mut best = -1.0;
        for j in k..n {
            let cn = vector::norm(&a.col(j)[k..]);
            if cn > best {
                best = cn;
                p = j;
            }
        }
        a.swap_cols(k, p);
        let x = a.col(k)[k..].to_vec();
        let alpha = vector::norm(&x);
        if alpha == 0.0 {
            r_diag.push(0.0);
            reflectors.push(Vec::new());
            continue;
        }
        let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = x;
        v[0] += sign * alpha;
        let vn = vector::norm(&v);
        for vi in v.iter_mut() {
            *vi /= vn;
        }
        for j in k..n {
            let col = &mut a.col_mut(j)[k..];
            let s = 2.0 * vector::dot(&v, col);
            vector::axpy(-s, &v, col);
        }
        r_diag.push(alpha);
        reflectors.push(v);
    }
    // Q = H_0 H_1 ... applied to the identity
    let mut q = Dense::zeros(m, m);
    for i in 0..m {
        q.set(i, i, 1.0);
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        for j in 0..m {
            let col = &mut q.col_mut(j)[k..];
            let s = 2.0 * vector::dot(v, col);
            vector::axpy(-s, v, col);
        }
    }
    PivotedQr { q, r_diag }
}

/// Orthonormal basis of the numerical null space of `A`.
///
/// Computed from a column-pivoted QR of `Aᵀ`: the rank is the number of
/// `|R_kk| > tol`, and the trailing columns of `Q` span the kernel.
pub fn kernel_basis(a: &Matrix, tol: f64) -> Subspace {
    let d = a.dim();
    let at = Dense::from_columns(d, &a.rows());
    let qr = qr_column_pivoted(at);
    let rank = qr.r_diag.iter().take_while(|r| **r > tol).count();
    let basis = (rank..d).map(|j| qr.q.col(j).to_vec()).collect();
    Subspace::from_orthonormal(d, basis)
}

/// Orthonormal bases of `span(vectors)` and of its orthogonal complement.
/// Vectors whose contribution falls below `rel_tol` times the largest
/// column norm are treated as dependent.
pub(crate) fn span_and_complement(
    ambient: usize,
    vectors: &[Vec<f64>],
    rel_tol: f64,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    if vectors.is_empty() {
        let all = (0..ambient).map(|j| vector::unit(ambient, j)).collect();
        return (Vec::new(), all);
    }
    let dense = Dense::from_columns(ambient, vectors);
    let scale = vectors.iter().map(|v| vector::norm(v)).fold(0.0, f64::max);
    let qr = qr_column_pivoted(dense);
    let rank = qr
        .r_diag
        .iter()
        .take_while(|r| **r > rel_tol * scale)
        .count();
    let span = (0..rank).map(|j| qr.q.col(j).to_vec()).collect();
    let rest = (rank..ambient).map(|j| qr.q.col(j).to_vec()).collect();
    (span, rest)
}

/// Default Cholesky pivot threshold `dim · ε · max|s_ij|`.
pub fn default_cholesky_tol(s: &SymmetricMatrix) -> f64 {
    s.dim() as f64 * f64::EPSILON * s.as_matrix().max_abs()
}

/// Lower-triangular `L` with `L Lᵀ = S`.
pub fn cholesky(s: &SymmetricMatrix) -> Result<Matrix> {
    cholesky_with_tol(s, default_cholesky_tol(s))
}

pub fn cholesky_with_tol(s: &SymmetricMatrix, tol: f64) -> Result<Matrix> {
    let d = s.dim();
    let a = s.as_matrix();
    let mut l = vec![0.0; d * d];
    for j in 0..d {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[j * d + k] * l[j * d + k];
        }
        if pivot <= tol || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot, index: j });
        }
        let ljj = pivot.sqrt();
        l[j * d + j] = ljj;
        for i in (j + 1)..d {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = v / ljj;
        }
    }
    Ok(Matrix::from_raw(d, l))
}

/// PSD test without an eigensolver: `S + tol·I` must admit a Cholesky
/// factorization with positive pivots. Returns the failing pivot on error.
pub fn psd_within(s: &SymmetricMatrix, tol: f64) -> std::result::Result<(), f64> {
    match cholesky_with_tol(&s.shifted(tol), 0.0) {
        Ok(_) => Ok(()),
        Err(Error::NotPositiveDefinite { pivot, .. }) => Err(pivot),
        Err(_) => Err(f64::NAN),
    }
}

/// Smallest singular value of `A`.
pub fn min_singular_value(a: &Matrix) -> f64 {
    min_singular_pair(a).0
}

/// Smallest singular value with its right singular vector, by inverse
/// iteration on `AᵀA` through an LU of `A` (never forming `AᵀA`).
///
/// The returned value is `‖A v‖` for the best unit iterate `v`, so it is
/// always an upper bound on `σ_min` and exact once `v` has converged.
pub fn min_singular_pair(a: &Matrix) -> (f64, Vec<f64>) {
    let d = a.dim();
    let lu = Lu::factor_regularized(a);
    // deterministic start with no special alignment
    let mut v: Vec<f64> = (0..d)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 1.618_033_988_75 + 0.3).sin())
        .collect();
    v = vector::normalized(&v).expect("nonzero start");
    let mut best = (vector::norm(&a.mul_vec(&v)), v.clone());
    let mut prev = f64::INFINITY;
    for _ in 0..500 {
        let z = lu.solve_transpose(&v);
        let w = lu.solve(&z);
        let Some(next) = vector::normalized(&w) else {
            break;
        };
        v = next;
        let sigma = vector::norm(&a.mul_vec(&v));
        if sigma < best.0 {
            best = (sigma, v.clone());
        }
        if (prev - sigma).abs() <= 1e-15 * sigma.max(f64::MIN_POSITIVE) || sigma == 0.0 {
            break;
        }
        prev = sigma;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let x = solve_linear(&Matrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        let x = solve_linear(&Matrix::from_diagonal(&[2.0, 4.0]), &[2.0, 4.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
    }

    #[test]
    fn solve_rotation_multiplies_back() {
        let a = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let x = solve_linear(&a, &[1.0, 0.0]).unwrap();
        assert!(close(&x, &[0.0, -1.0], 1e-15));
        assert!(close(&a.mul_vec(&x), &[1.0, 0.0], 1e-15));
    }

    #[test]
    fn solve_reports_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            solve_linear(&a, &[1.0, 0.0]),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            solve_linear(&a, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transpose_solve_matches() {
        let a = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.5],
            vec![-1.0, 3.0, 1.0],
            vec![0.0, 4.0, -2.0],
        ])
        .unwrap();
        let lu = Lu::factor(&a, 1e-14).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = lu.solve_transpose(&b);
        assert!(close(&a.tr_mul_vec(&x), &b, 1e-13));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::identity(2), 1e-12).dim(), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(2), 1e-12).dim(), 2);
        let k = kernel_basis(&Matrix::from_diagonal(&[1.0, 0.0, 0.0]), 1e-12);
        assert_eq!(k.dim(), 2);
        for b in k.basis() {
            assert!(b[0].abs() < 1e-15);
        }
        assert!(k.contains(&[0.0, 1.0, 0.0], 1e-12));
        assert!(k.contains(&[0.0, 0.0, 1.0], 1e-12));
    }

    #[test]
    fn cholesky_examples() {
        let l = cholesky(&SymmetricMatrix::identity(2)).unwrap();
        assert_eq!(l, Matrix::identity(2));
        let l = cholesky(&SymmetricMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_eq!(l, Matrix::from_diagonal(&[2.0, 3.0]));
        let s = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let l = cholesky(&s).unwrap();
        assert_eq!(l[(0, 1)], 0.0);
        let back = l.matmul(&l.transpose());
        assert!(back.sub(s.as_matrix()).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let s = SymmetricMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            cholesky(&s),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
        assert!(psd_within(&SymmetricMatrix::from_diagonal(&[1.0, 0.0]), 1e-12).is_ok());
        assert!(psd_within(&s, 1e-12).is_err());
    }

    #[test]
    fn min_singular_examples() {
        assert!((min_singular_value(&Matrix::identity(3)) - 1.0).abs() < 1e-12);
        let s = min_singular_value(&Matrix::from_diagonal(&[5.0, 0.5]));
        assert!((s - 0.5).abs() <= 1e-8 * 0.5);
        let ones = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(min_singular_value(&ones) < 1e-14);
    }

    #[test]
    fn min_singular_of_rotation_shift() {
        // singular values of [[3,1],[0,2]]: sqrt of eigenvalues of AᵀA
        let a = Matrix::from_rows(&[vec![3.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let (tr, det) = (14.0f64, 36.0f64);
        let expected = ((tr - (tr * tr - 4.0 * det).sqrt()) / 2.0).sqrt();
        let got = min_singular_value(&a);
        assert!((got - expected).abs() <= 1e-8 * expected);
    }
}
