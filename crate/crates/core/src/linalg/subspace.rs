use super::decomp::span_and_complement;
use super::{vector, Matrix};
use crate::error::{Error, Result};

/// Linear subspace of `R^n` given by a basis.
///
/// Subspaces produced by this crate carry orthonormal bases; user-supplied
/// bases only need to be linearly independent.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        for b in &basis {
            if b.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: b.len(),
                });
            }
        }
        if basis.len() > ambient_dim {
            return Err(Error::InvalidInput(format!(
                "{} basis vectors in dimension {ambient_dim}",
                basis.len()
            )));
        }
        let (span, _) = span_and_complement(ambient_dim, &basis, 1e-12);
        if span.len() != basis.len() {
            return Err(Error::InvalidInput("basis vectors are linearly dependent".into()));
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: Vec<Vec<f64>>) -> Self {
        Subspace { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// Orthonormal basis of `span(vectors)`, dropping dependent directions.
    pub fn span_of(ambient_dim: usize, vectors: &[Vec<f64>]) -> Self {
        let (span, _) = span_and_complement(ambient_dim, vectors, 1e-12);
        Subspace::from_orthonormal(ambient_dim, span)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn orthonormalized(&self) -> Subspace {
        Subspace::span_of(self.ambient_dim, &self.basis)
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Subspace {
        let (_, rest) = span_and_complement(self.ambient_dim, &self.basis, 1e-12);
        Subspace::from_orthonormal(self.ambient_dim, rest)
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> Matrix {
        let on = self.orthonormalized();
        let d = self.ambient_dim;
        let mut data = vec![0.0; d * d];
        for b in on.basis() {
            for i in 0..d {
                for j in 0..d {
                    data[i * d + j] += b[i] * b[j];
                }
            }
        }
        Matrix::from_raw(d, data)
    }

    /// Distance from `x` to the subspace, relative to `‖x‖`.
    pub fn relative_distance(&self, x: &[f64]) -> f64 {
        let on = self.orthonormalized();
        let mut r = x.to_vec();
        for b in on.basis() {
            let c = vector::dot(b, &r);
            vector::axpy(-c, b, &mut r);
        }
        let nx = vector::norm(x);
        if nx == 0.0 {
            0.0
        } else {
            vector::norm(&r) / nx
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.relative_distance(x) <= tol
    }

    /// `‖(I − P) A P‖_F` with `P` the orthogonal projector: zero iff the
    /// subspace is invariant under `A`.
    pub fn invariance_defect(&self, a: &Matrix) -> f64 {
        let on = self.orthonormalized();
        let mut total = 0.0;
        for b in on.basis() {
            let mut ab = a.mul_vec(b);
            for c in on.basis() {
                let k = vector::dot(c, &ab);
                vector::axpy(-k, c, &mut ab);
            }
            total += vector::dot(&ab, &ab);
        }
        total.sqrt()
    }

    /// Matrix of `Bᵀ A B` for the orthonormal basis `B` (the compression of
    /// `A`; the restriction when the subspace is invariant).
    pub fn compress(&self, a: &Matrix) -> Option<Matrix> {
        let on = self.orthonormalized();
        let k = on.dim();
        if k == 0 {
            return None;
        }
        let images: Vec<Vec<f64>> = on.basis().iter().map(|b| a.mul_vec(b)).collect();
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                data[i * k + j] = vector::dot(&on.basis()[i], &images[j]);
            }
        }
        Some(Matrix::from_raw(k, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dependent_basis() {
        let err = Subspace::new(2, vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn complement_and_projector() {
        let s = Subspace::new(3, vec![vec![1.0, 1.0, 0.0]]).unwrap();
        let c = s.complement();
        assert_eq!(c.dim(), 2);
        for b in c.basis() {
            assert!((b[0] + b[1]).abs() < 1e-14);
        }
        let p = s.projector();
        assert!((p[(0, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invariance_defect_detects_invariance() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        let e1 = Subspace::new(2, vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(e1.invariance_defect(&a), 0.0);
        let e2 = Subspace::new(2, vec![vec![0.0, 1.0]]).unwrap();
        assert!((e2.invariance_defect(&a) - 2.0).abs() < 1e-15);
    }
}
