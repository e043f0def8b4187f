//! Eigenvectors of cone-preserving maps by the shifted power iteration
//! `x ← normalize((I + T) x)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{PolyhedralCone, CONE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{psd_within, svec_len, svec_trace, vector, Lu, Matrix, SymmetricMatrix};

/// Relative tolerance for the membership test applied to every iterate.
pub const ITERATE_MEMBERSHIP_TOL: f64 = 1e-8;

/// A closed nondegenerate cone, as seen by the engine.
pub trait ConeHandle: Sync {
    fn space_dim(&self) -> usize;
    fn contains(&self, x: &[f64], tol: f64) -> bool;
    /// Representative of the ray through `x` on the cone's unit slice.
    fn normalize(&self, x: &[f64]) -> Option<Vec<f64>>;
    fn interior_seed(&self) -> Vec<f64>;
    /// Rays used as restart points when the iteration from the interior
    /// seed does not settle.
    fn boundary_rays(&self) -> Vec<Vec<f64>> {
        Vec::new()
    }
    /// Interior seed moved by a random positive mix of boundary rays.
    fn perturbed_seed(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = self.interior_seed();
        for r in self.boundary_rays() {
            let w: f64 = rng.gen_range(0.0..0.25);
            vector::axpy(w, &r, &mut x);
        }
        x
    }
}

/// Nonnegative orthant; the slice is the unit sphere.
#[derive(Clone, Copy, Debug)]
pub struct Orthant {
    pub dim: usize,
}

impl ConeHandle for Orthant {
    fn space_dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        let scale = vector::norm(x);
        x.iter().all(|xi| *xi >= -tol * scale)
    }

    fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        vector::normalized(x)
    }

    fn interior_seed(&self) -> Vec<f64> {
        vec![1.0 / (self.dim as f64).sqrt(); self.dim]
    }

    fn boundary_rays(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| vector::unit(self.dim, i)).collect()
    }
}

/// Positive semidefinite `d×d` matrices in svec coordinates; the slice is
/// `trace = 1`.
#[derive(Clone, Copy, Debug)]
pub struct PsdCone {
    pub dim: usize,
}

impl ConeHandle for PsdCone {
    fn space_dim(&self) -> usize {
        svec_len(self.dim)
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        let s = SymmetricMatrix::from_svec(self.dim, x);
        let scale = svec_trace(self.dim, x).abs().max(vector::norm(x));
        if scale == 0.0 {
            return true;
        }
        psd_within(&s, tol * scale).is_ok()
    }

    fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        let t = svec_trace(self.dim, x);
        if t > 0.0 && t.is_finite() {
            Some(vector::scaled(x, 1.0 / t))
        } else {
            None
        }
    }

    fn interior_seed(&self) -> Vec<f64> {
        SymmetricMatrix::identity(self.dim)
            .scaled(1.0 / self.dim as f64)
            .to_svec()
    }

    fn boundary_rays(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| SymmetricMatrix::outer(&vector::unit(self.dim, i)).to_svec())
            .collect()
    }

    fn perturbed_seed(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut s = SymmetricMatrix::identity(self.dim).scaled(1.0 / self.dim as f64);
        for _ in 0..self.dim {
            let v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            s = s.add(&SymmetricMatrix::outer(&v).scaled(0.25 / self.dim as f64));
        }
        s.to_svec()
    }
}

impl ConeHandle for PolyhedralCone {
    fn space_dim(&self) -> usize {
        self.ambient_dim()
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        PolyhedralCone::contains(self, x, tol)
    }

    fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        vector::normalized(x)
    }

    /// Sum of the unit generators, which lies in the relative interior.
    fn interior_seed(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.ambient_dim()];
        for g in self.generators() {
            vector::axpy(1.0, g, &mut s);
        }
        vector::normalized(&s).unwrap_or(s)
    }

    fn boundary_rays(&self) -> Vec<Vec<f64>> {
        self.generators().to_vec()
    }
}

pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearMap for Matrix {
    fn dim(&self) -> usize {
        Matrix::dim(self)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mul_vec(x)
    }
}

/// `S ↦ uᵀ S u` acting on svec coordinates.
#[derive(Clone, Debug)]
pub struct CongruenceMap {
    pub u: Matrix,
}

impl LinearMap for CongruenceMap {
    fn dim(&self) -> usize {
        svec_len(self.u.dim())
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let s = SymmetricMatrix::from_svec(self.u.dim(), x);
        congruence_action(&s, &self.u).to_svec()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Bound on both the relative step and the relative eigen-residual.
    pub tol: f64,
    pub max_iter: usize,
    /// `‖T x‖ ≤ zero_tol·‖x‖` counts as `T x = 0`.
    pub zero_tol: f64,
    /// Start from a randomly perturbed seed instead of the fixed interior one.
    pub perturb_seed: Option<u64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            tol: 1e-10,
            max_iter: 10_000,
            zero_tol: 1e-14,
            perturb_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeFixedPoint {
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    /// `‖T x − λ x‖ / ‖x‖`
    pub residual: f64,
    pub iterations: usize,
}

/// An eigenvector of `t` inside `cone` with a nonnegative eigenvalue.
///
/// Runs from the interior seed first. If that does not settle within
/// `max_iter` (a dominant Jordan block on the boundary, or a tie), the
/// iteration is restarted from each boundary ray and the settled run with
/// the largest eigenvalue is returned.
pub fn birkhoff_eigenvector<T, C>(t: &T, cone: &C, opts: &EngineOptions) -> Result<ConeFixedPoint>
where
    T: LinearMap + ?Sized,
    C: ConeHandle + ?Sized,
{
    let n = cone.space_dim();
    if t.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.dim(),
        });
    }
    let seed = match opts.perturb_seed {
        Some(s) => cone.perturbed_seed(&mut ChaCha8Rng::seed_from_u64(s)),
        None => cone.interior_seed(),
    };
    let first = iterate(t, cone, &seed, opts);
    let Err(Error::NonConvergence { .. }) = first else {
        return first;
    };
    let mut best: Option<ConeFixedPoint> = None;
    for ray in cone.boundary_rays() {
        if let Ok(fp) = iterate(t, cone, &ray, opts) {
            if best.as_ref().is_none_or(|b| fp.eigenvalue > b.eigenvalue) {
                best = Some(fp);
            }
        }
    }
    best.ok_or_else(|| first.unwrap_err())
}

fn iterate<T, C>(t: &T, cone: &C, start: &[f64], opts: &EngineOptions) -> Result<ConeFixedPoint>
where
    T: LinearMap + ?Sized,
    C: ConeHandle + ?Sized,
{
    let mut x = cone
        .normalize(start)
        .ok_or_else(|| Error::InvalidInput("seed is not a nonzero cone vector".into()))?;
    if !cone.contains(&t.apply(&x), ITERATE_MEMBERSHIP_TOL) {
        return Err(Error::LeftCone { iteration: 0 });
    }
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let tx = t.apply(&x);
        let nx = vector::norm(&x);
        if vector::norm(&tx) <= opts.zero_tol * nx {
            return Ok(ConeFixedPoint {
                residual: vector::norm(&tx) / nx,
                vector: x,
                eigenvalue: 0.0,
                iterations: it,
            });
        }
        let lambda = vector::dot(&tx, &x) / vector::dot(&x, &x);
        let mut r = tx.clone();
        vector::axpy(-lambda, &x, &mut r);
        residual = vector::norm(&r) / nx;
        let y = vector::add(&x, &tx);
        let next = cone
            .normalize(&y)
            .ok_or(Error::LeftCone { iteration: it })?;
        if !cone.contains(&next, ITERATE_MEMBERSHIP_TOL) {
            return Err(Error::LeftCone { iteration: it });
        }
        let change = vector::norm(&vector::sub(&next, &x)) / nx;
        if residual <= opts.tol && change <= opts.tol {
            return Ok(ConeFixedPoint {
                vector: x,
                eigenvalue: lambda,
                residual,
                iterations: it,
            });
        }
        x = next;
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerronResult {
    #[serde(flatten)]
    pub fixed_point: ConeFixedPoint,
    /// Collatz–Wielandt bracket `[min (Ax)ᵢ/xᵢ, max (Ax)ᵢ/xᵢ]` over `xᵢ > 0`.
    pub bracket: [f64; 2],
}

/// Perron eigenvector of an entrywise nonnegative matrix.
pub fn perron_frobenius(a: &Matrix, opts: &EngineOptions) -> Result<PerronResult> {
    let d = a.dim();
    for i in 0..d {
        for j in 0..d {
            if a[(i, j)] < 0.0 {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: j,
                    value: a[(i, j)],
                });
            }
        }
    }
    let fp = birkhoff_eigenvector(a, &Orthant { dim: d }, opts)?;
    let ax = a.mul_vec(&fp.vector);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (axi, xi) in ax.iter().zip(&fp.vector) {
        if *xi > 0.0 {
            let q = axi / xi;
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    Ok(PerronResult {
        fixed_point: fp,
        bracket: [lo, hi],
    })
}

/// `uᵀ S u`, symmetrized after the products.
pub fn congruence_action(s: &SymmetricMatrix, u: &Matrix) -> SymmetricMatrix {
    let su = s.as_matrix().matmul(u);
    SymmetricMatrix::symmetrize(&u.transpose().matmul(&su))
}

/// A positive semidefinite form `S` with `uᵀSu = λS`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantForm {
    /// Normalized to trace 1.
    pub form: SymmetricMatrix,
    pub eigenvalue: f64,
    /// `‖uᵀSu − λS‖_F`
    pub residual: f64,
    pub iterations: usize,
}

/// Runs the engine on `S ↦ uᵀSu` over the PSD cone, seeded at `I/d`.
pub fn psd_invariant_form(u: &Matrix, opts: &EngineOptions) -> Result<InvariantForm> {
    let d = u.dim();
    let map = CongruenceMap { u: u.clone() };
    let fp = birkhoff_eigenvector(&map, &PsdCone { dim: d }, opts)?;
    let form = SymmetricMatrix::from_svec(d, &fp.vector);
    let residual = congruence_action(&form, u)
        .sub(&form.scaled(fp.eigenvalue))
        .frobenius_norm();
    Ok(InvariantForm {
        form,
        eigenvalue: fp.eigenvalue,
        residual,
        iterations: fp.iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalDecomposition {
    /// Solution of `(I + u) y = x`.
    pub y: Vec<f64>,
    /// `⟨u y, y⟩ / ⟨y, y⟩`
    pub ratio: f64,
    /// Sine of the angle between `u y` and `y` (0 when `u y = 0`).
    pub sine: f64,
}

/// Certifies that an extremal ray `x` of a `(I + u)`-invariant cone comes
/// from an eigenvector: `x = y + u(y)` with `y ∈ C` and `u(y) ∥ y`.
pub fn extremal_decomposition_check(
    u: &Matrix,
    c: &PolyhedralCone,
    x: &[f64],
    tol: f64,
) -> Result<ExtremalDecomposition> {
    let d = u.dim();
    if c.ambient_dim() != d || x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if c.ambient_dim() != d { c.ambient_dim() } else { x.len() },
        });
    }
    let v = u.shifted(1.0);
    let lu = Lu::factor(&v, crate::linalg::default_singular_tol(&v)).map_err(|_| Error::SingularShift)?;
    let y = lu.solve(x);
    if !c.contains(&y, CONE_TOL) {
        return Err(Error::NotInCone);
    }
    let uy = u.mul_vec(&y);
    let nuy = vector::norm(&uy);
    let ratio = vector::dot(&uy, &y) / vector::dot(&y, &y);
    let sine = if nuy == 0.0 {
        0.0
    } else {
        let mut r = uy.clone();
        vector::axpy(-ratio, &y, &mut r);
        vector::norm(&r) / nuy
    };
    if sine > tol {
        return Err(Error::NotParallel { sine });
    }
    Ok(ExtremalDecomposition { y, ratio, sine })
}
