use serde::{Deserialize, Serialize};

use super::{vector, Matrix};
use crate::error::{Error, Result};

/// Matrix of a quadratic form `q(x) = xᵀSx`.
///
/// Symmetry is exact: every constructor symmetrizes its input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymmetricMatrix {
    inner: Matrix,
}

impl SymmetricMatrix {
    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn symmetrize(a: &Matrix) -> Self {
        let d = a.dim();
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            data[i * d + i] = a[(i, i)];
            for j in (i + 1)..d {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                data[i * d + j] = v;
                data[j * d + i] = v;
            }
        }
        SymmetricMatrix {
            inner: Matrix::from_raw(d, data),
        }
    }

    /// Accepts `a` only if its largest asymmetry is at most `max_asymmetry`,
    /// then symmetrizes.
    pub fn from_matrix_checked(a: &Matrix, max_asymmetry: f64) -> Result<Self> {
        let asym = asymmetry(a);
        if asym > max_asymmetry {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(SymmetricMatrix::symmetrize(a))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        let tol = 1e-12 * m.max_abs().max(1.0);
        SymmetricMatrix::from_matrix_checked(&m, tol)
    }

    pub fn identity(dim: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::zeros(dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymmetricMatrix {
            inner: Matrix::from_diagonal(diag),
        }
    }

    /// Rank-one form `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let d = v.len();
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = v[i] * v[j];
            }
        }
        SymmetricMatrix {
            inner: Matrix::from_raw(d, data),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    /// `q(x) = xᵀSx`
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        vector::dot(x, &self.inner.mul_vec(x))
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymmetricMatrix {
            inner: self.inner.scaled(s),
        }
    }

    pub fn add(&self, other: &SymmetricMatrix) -> Self {
        SymmetricMatrix {
            inner: self.inner.add(&other.inner),
        }
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> Self {
        SymmetricMatrix {
            inner: self.inner.sub(&other.inner),
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        SymmetricMatrix {
            inner: self.inner.shifted(c),
        }
    }

    /// Coordinates in the orthonormal basis of symmetric matrices under the
    /// trace inner product: diagonal entries, then `√2·s_ij` for `i < j`
    /// in row-major order. Euclidean norms of these coordinates are
    /// Frobenius norms.
    pub fn to_svec(&self) -> Vec<f64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(svec_len(d));
        for i in 0..d {
            v.push(self.inner[(i, i)]);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                v.push(std::f64::consts::SQRT_2 * self.inner[(i, j)]);
            }
        }
        v
    }

    pub fn from_svec(dim: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), svec_len(dim), "svec length mismatch");
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = v[i];
        }
        let mut k = dim;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let x = v[k] * std::f64::consts::FRAC_1_SQRT_2;
                data[i * dim + j] = x;
                data[j * dim + i] = x;
                k += 1;
            }
        }
        SymmetricMatrix {
            inner: Matrix::from_raw(dim, data),
        }
    }
}

/// Dimension `d(d+1)/2` of the space of symmetric `d×d` matrices.
pub fn svec_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Trace of the symmetric matrix with the given svec coordinates.
pub fn svec_trace(dim: usize, v: &[f64]) -> f64 {
    v[..dim].iter().sum()
}

/// Largest `|a_ij − a_ji|`.
pub fn asymmetry(a: &Matrix) -> f64 {
    let d = a.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

impl TryFrom<Vec<Vec<f64>>> for SymmetricMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymmetricMatrix::from_rows(&rows)
    }
}

impl From<SymmetricMatrix> for Vec<Vec<f64>> {
    fn from(s: SymmetricMatrix) -> Self {
        s.inner.rows()
    }
}
