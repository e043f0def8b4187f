use serde::{Deserialize, Serialize};

use super::{image_cone, PolyhedralCone, CONE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    /// Hausdorff distance between the unit generator sets of `uᵏ(C)` and `uᵏ⁺¹(C)`.
    pub gap: f64,
    /// `uᵏ⁺¹(C) ⊆ uᵏ(C)` at [`CONE_TOL`].
    pub nested: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeChain {
    /// `[C, u(C), …, uⁿ(C)]`
    pub cones: Vec<PolyhedralCone>,
    pub steps: Vec<ChainStep>,
}

impl ConeChain {
    pub fn last(&self) -> &PolyhedralCone {
        self.cones.last().expect("chain holds at least C")
    }
}

/// Hausdorff distance between two finite sets of vectors.
pub fn hausdorff_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| vector::norm(&vector::sub(p, q)))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// The descending chain `C ⊇ u(C) ⊇ u²(C) ⊇ …` up to `uⁿ(C)`.
///
/// Requires `u(C) ⊆ C`. The intersection of the chain need not be
/// polyhedral, so only the finite stages are returned.
pub fn chain_iterate(u: &Matrix, c: &PolyhedralCone, n: usize) -> Result<ConeChain> {
    if c.is_zero() {
        return Err(Error::InvalidInput("chain needs a nonzero cone".into()));
    }
    let first = image_cone(u, c)?;
    for g in first.generators() {
        let fit = c.membership(g);
        if fit.residual > CONE_TOL * (1.0 + vector::norm(g)) {
            return Err(Error::NotInvariant {
                defect: fit.residual,
            });
        }
    }
    let mut cones = vec![c.clone()];
    let mut steps = Vec::with_capacity(n);
    let mut next = Some(first);
    for _ in 0..n {
        let prev = cones.last().expect("nonempty");
        let img = match next.take() {
            Some(img) => img,
            None => image_cone(u, prev)?,
        };
        steps.push(ChainStep {
            gap: hausdorff_gap(prev.generators(), img.generators()),
            nested: prev.contains_cone(&img, CONE_TOL),
        });
        cones.push(img);
    }
    Ok(ConeChain { cones, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_chain_is_constant() {
        let o = PolyhedralCone::orthant(3);
        let ch = chain_iterate(&Matrix::identity(3), &o, 4).unwrap();
        assert_eq!(ch.cones.len(), 5);
        assert!(ch.steps.iter().all(|s| s.gap == 0.0 && s.nested));
    }

    #[test]
    fn diagonal_contraction_on_orthant_is_constant() {
        // diag(1, 1/2) maps each axis onto itself
        let o = PolyhedralCone::orthant(2);
        let ch = chain_iterate(&Matrix::from_diagonal(&[1.0, 0.5]), &o, 20).unwrap();
        assert!(ch.steps.iter().all(|s| s.gap == 0.0));
    }

    #[test]
    fn wedge_collapses_to_dominant_axis() {
        let c = PolyhedralCone::new(2, vec![vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ch = chain_iterate(&Matrix::from_diagonal(&[1.0, 0.5]), &c, 20).unwrap();
        for w in ch.steps.windows(2) {
            assert!(w[1].gap < w[0].gap);
        }
        assert!(ch.steps.iter().all(|s| s.nested));
        for g in ch.last().generators() {
            assert!((g[0] - 1.0).abs() < 1e-11 && g[1].abs() < 1e-6);
        }
    }

    #[test]
    fn shifted_symmetric_map_converges() {
        let v = Matrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let ch = chain_iterate(&v, &PolyhedralCone::orthant(2), 30).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for g in ch.last().generators() {
            assert!((g[0] - h).abs() < 1e-8 && (g[1] - h).abs() < 1e-8);
        }
        assert!(ch.steps.iter().all(|s| s.nested));
    }

    #[test]
    fn rejects_non_invariant_map() {
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let err = chain_iterate(&rot, &PolyhedralCone::orthant(2), 3).unwrap_err();
        assert!(matches!(err, Error::NotInvariant { .. }));
    }
}
