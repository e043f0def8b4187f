//! Double description: halfspaces to generators.

use super::PolyhedralCone;
use crate::error::{Error, Result};
use crate::linalg::vector;

/// Largest ambient dimension accepted by [`dual_cone`].
pub const DUAL_MAX_DIM: usize = 6;

const TIGHT: f64 = 1e-10;

/// `C⋆ = {φ : φ(x) ≥ 0 for all x ∈ C}`.
///
/// Each generator `g` of `C` is the halfspace `⟨g, φ⟩ ≥ 0`. Starting from
/// the whole space, halfspaces are added one at a time, keeping a
/// lineality basis `L` and a set of rays. While `a` is not orthogonal to
/// `L`, one lineality direction becomes a ray; otherwise rays on opposite
/// sides are combined pairwise when adjacent (no third ray is tight on
/// all constraints the pair shares). The result is the rays together with
/// `±` each lineality direction.
pub fn dual_cone(c: &PolyhedralCone) -> Result<PolyhedralCone> {
    let d = c.ambient_dim();
    if d > DUAL_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: DUAL_MAX_DIM,
        });
    }
    let mut lineality: Vec<Vec<f64>> = (0..d).map(|i| vector::unit(d, i)).collect();
    let mut rays: Vec<Vec<f64>> = Vec::new();
    let constraints = c.generators();
    for (step, a) in constraints.iter().enumerate() {
        let pivot = lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, vector::dot(a, l)))
            .filter(|(_, v)| v.abs() > TIGHT)
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, bv)) if bv.abs() >= v.abs() => best,
                _ => Some((i, v)),
            });
        if let Some((i, v)) = pivot {
            let mut l0 = lineality.remove(i);
            let mut al0 = v;
            if al0 < 0.0 {
                l0 = vector::scaled(&l0, -1.0);
                al0 = -al0;
            }
            for l in lineality.iter_mut() {
                let k = vector::dot(a, l) / al0;
                vector::axpy(-k, &l0, l);
            }
            for r in rays.iter_mut() {
                let k = vector::dot(a, r) / al0;
                vector::axpy(-k, &l0, r);
                *r = vector::normalized(r).unwrap_or_else(|| r.clone());
            }
            lineality = orthonormalize(&lineality);
            rays.push(vector::normalized(&l0).unwrap_or(l0));
            continue;
        }
        let seen = &constraints[..step];
        let mut keep = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for r in rays.drain(..) {
            let v = vector::dot(a, &r);
            if v > TIGHT {
                pos.push((r, v));
            } else if v < -TIGHT {
                neg.push((r, v));
            } else {
                keep.push(r);
            }
        }
        let zero_sets = |r: &Vec<f64>| -> Vec<bool> {
            seen.iter().map(|s| vector::dot(s, r).abs() <= TIGHT).collect()
        };
        let all: Vec<(Vec<f64>, Vec<bool>)> = pos
            .iter()
            .map(|(r, _)| r)
            .chain(neg.iter().map(|(r, _)| r))
            .chain(keep.iter())
            .map(|r| (r.clone(), zero_sets(r)))
            .collect();
        let mut fresh = Vec::new();
        for (pi, (p, ap)) in pos.iter().enumerate() {
            for (ni, (n, an)) in neg.iter().enumerate() {
                let zp = &all[pi].1;
                let zn = &all[pos.len() + ni].1;
                let shared: Vec<bool> = zp.iter().zip(zn).map(|(x, y)| *x && *y).collect();
                let blocked = all.iter().enumerate().any(|(k, (_, zk))| {
                    k != pi
                        && k != pos.len() + ni
                        && shared.iter().zip(zk).all(|(s, z)| !*s || *z)
                });
                if blocked {
                    continue;
                }
                let mut r = vector::scaled(n, *ap);
                vector::axpy(-an, p, &mut r);
                if let Some(u) = vector::normalized(&r) {
                    fresh.push(u);
                }
            }
        }
        keep.extend(pos.into_iter().map(|(r, _)| r));
        keep.extend(fresh);
        rays = keep;
    }
    let mut generators = rays;
    for l in &lineality {
        generators.push(l.clone());
        generators.push(vector::scaled(l, -1.0));
    }
    PolyhedralCone::new(d, generators)
}

fn orthonormalize(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let k = vector::dot(q, &w);
                vector::axpy(-k, q, &mut w);
            }
        }
        if let Some(u) = vector::normalized(&w) {
            if vector::norm(&w) > 1e-12 {
                out.push(u);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::CONE_TOL;

    #[test]
    fn orthant_is_self_dual() {
        let o = PolyhedralCone::orthant(3);
        assert!(dual_cone(&o).unwrap().same_set(&o, CONE_TOL));
    }

    #[test]
    fn planar_wedge() {
        let c = PolyhedralCone::new(2, vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let d = dual_cone(&c).unwrap();
        let want = PolyhedralCone::new(2, vec![vec![0.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(d.generators().len(), 2);
        assert!(d.same_set(&want, CONE_TOL));
        for g in d.generators() {
            for h in c.generators() {
                assert!(vector::dot(g, h) >= -1e-15);
            }
        }
    }

    #[test]
    fn dual_of_zero_is_everything() {
        let d = dual_cone(&PolyhedralCone::zero(2)).unwrap();
        assert_eq!(d.generators().len(), 4);
        for x in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            assert!(d.contains(&x, CONE_TOL));
        }
    }

    #[test]
    fn guard() {
        assert!(matches!(
            dual_cone(&PolyhedralCone::orthant(7)),
            Err(Error::DimensionTooLarge { dim: 7, max: 6 })
        ));
    }

    #[test]
    fn square_pyramid() {
        let c = PolyhedralCone::new(
            3,
            vec![
                vec![1.0, 1.0, 1.0],
                vec![1.0, -1.0, 1.0],
                vec![-1.0, 1.0, 1.0],
                vec![-1.0, -1.0, 1.0],
            ],
        )
        .unwrap();
        let d = dual_cone(&c).unwrap();
        assert_eq!(d.generators().len(), 4);
        assert!(crate::cones::double_dual_check(&c).unwrap());
    }
}
