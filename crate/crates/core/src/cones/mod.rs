//! Finitely generated convex cones in `R^d`.
//!
//! Cones are kept in generator form. The halfspace form only exists
//! transiently inside [`dual_cone`].

mod chain;
mod dual;
mod nnls;

use serde::{Deserialize, Serialize};

pub use chain::{chain_iterate, hausdorff_gap, ChainStep, ConeChain};
pub use dual::{dual_cone, DUAL_MAX_DIM};
pub use nnls::{nnls, NnlsSolution};

use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix};

/// Default absolute tolerance on normalized data.
pub const CONE_TOL: f64 = 1e-9;

/// Rays whose unit vectors are within this Euclidean distance are merged.
const DEDUP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeRepr", into = "ConeRepr")]
pub struct PolyhedralCone {
    ambient_dim: usize,
    generators: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl TryFrom<ConeRepr> for PolyhedralCone {
    type Error = Error;

    fn try_from(r: ConeRepr) -> Result<Self> {
        PolyhedralCone::new(r.dim, r.generators)
    }
}

impl From<PolyhedralCone> for ConeRepr {
    fn from(c: PolyhedralCone) -> Self {
        ConeRepr {
            dim: c.ambient_dim,
            generators: c.generators,
        }
    }
}

impl PolyhedralCone {
    /// Normalizes every generator and drops repeated rays.
    pub fn new(ambient_dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("cone dimension must be positive".into()));
        }
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(generators.len());
        for (index, g) in generators.iter().enumerate() {
            if g.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("generator {index} is not finite")));
            }
            // unit vectors are kept bit for bit so that printed cones parse back unchanged
            let n = vector::norm(g);
            let unit = if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
                g.clone()
            } else {
                vector::normalized(g).ok_or(Error::ZeroGenerator { index })?
            };
            if kept
                .iter()
                .all(|k| vector::norm(&vector::sub(k, &unit)) > DEDUP_TOL)
            {
                kept.push(unit);
            }
        }
        Ok(PolyhedralCone {
            ambient_dim,
            generators: kept,
        })
    }

    /// The zero cone `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        PolyhedralCone {
            ambient_dim,
            generators: Vec::new(),
        }
    }

    /// Nonnegative orthant.
    pub fn orthant(ambient_dim: usize) -> Self {
        PolyhedralCone {
            ambient_dim,
            generators: (0..ambient_dim).map(|i| vector::unit(ambient_dim, i)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Unit generators.
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// Nonnegative least-squares fit of `x` by the generators.
    ///
    /// # Panics
    /// If `x` has the wrong length.
    pub fn membership(&self, x: &[f64]) -> NnlsSolution {
        assert_eq!(x.len(), self.ambient_dim, "point dimension mismatch");
        nnls(&self.generators, x)
    }

    /// `x ∈ C` up to `tol·(1 + ‖x‖)`.
    ///
    /// # Panics
    /// If `x` has the wrong length.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.membership(x).residual <= tol * (1.0 + vector::norm(x))
    }

    /// Every generator of `other` lies in `self`.
    pub fn contains_cone(&self, other: &PolyhedralCone, tol: f64) -> bool {
        other.generators.iter().all(|g| self.contains(g, tol))
    }

    /// Mutual containment.
    pub fn same_set(&self, other: &PolyhedralCone, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.contains_cone(other, tol)
            && other.contains_cone(self, tol)
    }

    /// `φ > 0` on every generator, i.e. on `C \ {0}`; such functionals form
    /// an open set.
    pub fn is_strictly_positive_on(&self, phi: &SeparatingFunctional, tol: f64) -> bool {
        !self.is_zero()
            && self
                .generators
                .iter()
                .all(|g| phi.eval(g) > tol)
    }
}

/// A linear functional `x ↦ ⟨coefficients, x⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatingFunctional {
    pub ambient_dim: usize,
    pub coefficients: Vec<f64>,
}

impl SeparatingFunctional {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().all(|c| *c == 0.0) {
            return Err(Error::InvalidInput("functional must be nonzero".into()));
        }
        Ok(SeparatingFunctional {
            ambient_dim: coefficients.len(),
            coefficients,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        vector::dot(&self.coefficients, x)
    }
}

fn check_dim(c: &PolyhedralCone, len: usize) -> Result<()> {
    if len != c.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: c.ambient_dim,
            found: len,
        });
    }
    Ok(())
}

pub fn contains(c: &PolyhedralCone, x: &[f64], tol: f64) -> bool {
    c.contains(x, tol)
}

/// `C = ⋆(C⋆)` up to [`CONE_TOL`].
pub fn double_dual_check(c: &PolyhedralCone) -> Result<bool> {
    let back = dual_cone(&dual_cone(c)?)?;
    Ok(back.same_set(c, CONE_TOL))
}

/// Generators that are not nonnegative combinations of the others.
///
/// Fails with `DegenerateCone` if the cone contains a line. A line inside
/// the cone always forces some generator's negation into the cone, so
/// checking generators is enough.
pub fn extremal_rays(c: &PolyhedralCone) -> Result<Vec<Vec<f64>>> {
    for (index, g) in c.generators.iter().enumerate() {
        let neg = vector::scaled(g, -1.0);
        if c.contains(&neg, CONE_TOL) {
            return Err(Error::DegenerateCone { index });
        }
    }
    let mut out = Vec::new();
    for (j, g) in c.generators.iter().enumerate() {
        let others: Vec<Vec<f64>> = c
            .generators
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, v)| v.clone())
            .collect();
        let fit = nnls(&others, g);
        if fit.residual > CONE_TOL * 2.0 {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// `φ` with `φ ≥ 0` on `C` and `φ(a) < 0`.
///
/// Taken as `proj_C(a) − a`, normalized; the projection comes from the
/// nonnegative least-squares fit.
pub fn separate(c: &PolyhedralCone, a: &[f64]) -> Result<SeparatingFunctional> {
    check_dim(c, a.len())?;
    let fit = c.membership(a);
    if fit.residual <= CONE_TOL * (1.0 + vector::norm(a)) {
        return Err(Error::PointInCone);
    }
    let mut p = vec![0.0; c.ambient_dim];
    for (g, x) in c.generators.iter().zip(&fit.coefficients) {
        vector::axpy(*x, g, &mut p);
    }
    let phi = vector::normalized(&vector::sub(&p, a)).ok_or(Error::PointInCone)?;
    SeparatingFunctional::new(phi)
}

/// The cone generated by `u(g)` for each generator `g`.
pub fn image_cone(u: &Matrix, c: &PolyhedralCone) -> Result<PolyhedralCone> {
    if u.dim() != c.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: c.ambient_dim,
            found: u.dim(),
        });
    }
    let zero_tol = 1e-12 * u.frobenius_norm();
    let mut images = Vec::with_capacity(c.generators.len());
    for (index, g) in c.generators.iter().enumerate() {
        let ug = u.mul_vec(g);
        if vector::norm(&ug) <= zero_tol {
            return Err(Error::KernelMeetsCone { index });
        }
        images.push(ug);
    }
    PolyhedralCone::new(c.ambient_dim, images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(rows: &[&[f64]]) -> PolyhedralCone {
        PolyhedralCone::new(rows[0].len(), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let o = PolyhedralCone::orthant(2);
        assert!(o.contains(&[1.0, 1.0], CONE_TOL));
        assert!(!o.contains(&[-1.0, 0.0], CONE_TOL));
        let c = cone(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let fit = c.membership(&[2.0, 1.0]);
        // coefficients refer to the unit generators (1,0) and (1,1)/√2
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2f64.sqrt()).abs() < 1e-12);
        assert!(c.contains(&[2.0, 1.0], CONE_TOL));
    }

    #[test]
    fn construction_normalizes_and_dedups() {
        let c = cone(&[&[2.0, 0.0], &[1.0, 0.0], &[-3.0, 0.0]]);
        assert_eq!(c.generators(), &[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let err = PolyhedralCone::new(2, vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::ZeroGenerator { index: 1 });
    }

    #[test]
    fn json_shape() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"dim":2,"generators":[[1.0,0.0],[0.0,1.0]]}"#);
        let back: PolyhedralCone = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<PolyhedralCone>(r#"{"dim":2,"generators":[[0,0]]}"#).is_err());
    }

    #[test]
    fn extremal_examples() {
        let c = cone(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(extremal_rays(&c).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(extremal_rays(&PolyhedralCone::orthant(3)).unwrap().len(), 3);
        let sq = cone(&[
            &[1.0, 1.0, 1.0],
            &[1.0, -1.0, 1.0],
            &[-1.0, 1.0, 1.0],
            &[-1.0, -1.0, 1.0],
        ]);
        assert_eq!(extremal_rays(&sq).unwrap().len(), 4);
        let line = cone(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(extremal_rays(&line), Err(Error::DegenerateCone { .. })));
    }

    #[test]
    fn separation_examples() {
        let phi = separate(&PolyhedralCone::orthant(2), &[-1.0, -1.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((phi.coefficients[0] - h).abs() < 1e-15 && (phi.coefficients[1] - h).abs() < 1e-15);
        let phi = separate(&cone(&[&[1.0, 0.0]]), &[0.0, 1.0]).unwrap();
        assert_eq!(phi.coefficients, vec![0.0, -1.0]);
        assert_eq!(phi.eval(&[1.0, 0.0]), 0.0);
        let phi = separate(&PolyhedralCone::zero(2), &[1.0, 0.0]).unwrap();
        assert_eq!(phi.coefficients, vec![-1.0, 0.0]);
        assert_eq!(
            separate(&PolyhedralCone::orthant(2), &[1.0, 2.0]).unwrap_err(),
            Error::PointInCone
        );
    }

    #[test]
    fn interior_functional() {
        let o = PolyhedralCone::orthant(2);
        let phi = SeparatingFunctional::new(vec![1.0, 1.0]).unwrap();
        assert!(o.is_strictly_positive_on(&phi, 0.0));
        let edge = SeparatingFunctional::new(vec![1.0, 0.0]).unwrap();
        assert!(!o.is_strictly_positive_on(&edge, 0.0));
    }

    #[test]
    fn image_examples() {
        let o = PolyhedralCone::orthant(2);
        assert_eq!(image_cone(&Matrix::identity(2), &o).unwrap(), o);
        assert_eq!(image_cone(&Matrix::from_diagonal(&[2.0, 3.0]), &o).unwrap(), o);
        let u = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let img = image_cone(&u, &o).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(img.generators()[0], vec![1.0, 0.0]);
        assert!((img.generators()[1][0] - h).abs() < 1e-15);
        assert!((img.generators()[1][1] - h).abs() < 1e-15);
        let p = Matrix::from_diagonal(&[1.0, 0.0]);
        assert_eq!(image_cone(&p, &o).unwrap_err(), Error::KernelMeetsCone { index: 1 });
    }
}
