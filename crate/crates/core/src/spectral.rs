//! Real eigenvalues of symmetric matrices from a fixed point of the cone
//! of positive semidefinite forms.
//!
//! For symmetric `u`, the symmetric matrices commuting with `u` form a
//! space `V` containing the identity, and `f ↦ u² f` maps `V` into itself
//! and preserves its PSD part. A fixed ray `u² f = λ f` makes `u² − λ I`
//! singular, so `√λ` or `−√λ` is an eigenvalue of `u`.

use serde::{Deserialize, Serialize};

use crate::birkhoff::{birkhoff_eigenvector, congruence_action, ConeHandle, EngineOptions};
use crate::error::{Error, Result};
use crate::linalg::{
    kernel_basis, min_singular_pair, min_singular_value, psd_within, span_and_complement,
    svec_len, vector, Matrix, SymmetricMatrix,
};

/// Relative threshold on the commutator kernel.
pub const COMMUTANT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub engine: EngineOptions,
    /// A shift `u ∓ √λ I` counts as singular when its smallest singular
    /// value is at most `certificate_tol · (1 + ‖u‖_∞)`.
    pub certificate_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            engine: EngineOptions::default(),
            certificate_tol: 1e-7,
        }
    }
}

/// Orthonormal (trace inner product) basis of the symmetric solutions of
/// `f u = uᵀ f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutantBasis {
    pub dim: usize,
    pub basis: Vec<SymmetricMatrix>,
}

impl CommutantBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `Σ cᵢ bᵢ`
    pub fn combine(&self, coords: &[f64]) -> SymmetricMatrix {
        let mut v = vec![0.0; svec_len(self.dim)];
        for (b, c) in self.basis.iter().zip(coords) {
            vector::axpy(*c, &b.to_svec(), &mut v);
        }
        SymmetricMatrix::from_svec(self.dim, &v)
    }

    /// Orthogonal projection coordinates of `s`.
    pub fn coordinates(&self, s: &SymmetricMatrix) -> Vec<f64> {
        let sv = s.to_svec();
        self.basis.iter().map(|b| vector::dot(&b.to_svec(), &sv)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    /// The cone eigenvalue `λ` of the squared map.
    pub lambda_sq: f64,
    /// `+√λ` or `−√λ`.
    pub eigenvalue: f64,
    /// Fixed PSD direction, trace 1.
    pub witness_form: SymmetricMatrix,
    /// `σ_min(u − √λ I)`
    pub sigma_min_minus: f64,
    /// `σ_min(u + √λ I)`
    pub sigma_min_plus: f64,
    /// Both shifts are singular; `+√λ` was returned.
    pub ambiguous: bool,
    pub iterations: usize,
}

/// Kernel of `S ↦ S u − uᵀ S` on symmetric matrices.
///
/// The image is antisymmetric, so it is recorded by its strictly upper
/// entries scaled by `√2`.
fn twisted_commutator_kernel(u: &Matrix) -> CommutantBasis {
    let d = u.dim();
    let n = svec_len(d);
    let mut op = vec![0.0; n * n];
    for k in 0..n {
        let e = SymmetricMatrix::from_svec(d, &vector::unit(n, k));
        let su = e.as_matrix().matmul(u);
        let img = su.sub(&su.transpose());
        let mut row = 0;
        for i in 0..d {
            for j in (i + 1)..d {
                op[row * n + k] = std::f64::consts::SQRT_2 * img[(i, j)];
                row += 1;
            }
        }
    }
    let op = Matrix::new(n, op).expect("finite operator");
    let ker = kernel_basis(&op, COMMUTANT_TOL * u.frobenius_norm());
    CommutantBasis {
        dim: d,
        basis: ker
            .basis()
            .iter()
            .map(|v| SymmetricMatrix::from_svec(d, v))
            .collect(),
    }
}

pub fn commutant_selfadjoint_basis(u: &SymmetricMatrix) -> CommutantBasis {
    twisted_commutator_kernel(u.as_matrix())
}

/// PSD forms inside a subspace of symmetric matrices, in subspace
/// coordinates; the slice is `trace = 1`.
struct SubspacePsd<'a> {
    space: &'a CommutantBasis,
    traces: Vec<f64>,
    seed: Vec<f64>,
}

impl<'a> SubspacePsd<'a> {
    fn new(space: &'a CommutantBasis, seed: &SymmetricMatrix) -> Self {
        let traces = space.basis.iter().map(|b| b.trace()).collect();
        SubspacePsd {
            space,
            traces,
            seed: space.coordinates(seed),
        }
    }
}

impl ConeHandle for SubspacePsd<'_> {
    fn space_dim(&self) -> usize {
        self.space.len()
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        let f = self.space.combine(x);
        let scale = vector::norm(x).max(f.trace().abs());
        if scale == 0.0 {
            return true;
        }
        psd_within(&f, tol * scale).is_ok()
    }

    fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        let t = vector::dot(&self.traces, x);
        if t > 0.0 && t.is_finite() {
            Some(vector::scaled(x, 1.0 / t))
        } else {
            None
        }
    }

    fn interior_seed(&self) -> Vec<f64> {
        self.seed.clone()
    }
}

/// Matrix of `T` compressed to the subspace: `(⟨bᵢ, T bⱼ⟩)`.
fn compress(space: &CommutantBasis, t: impl Fn(&SymmetricMatrix) -> SymmetricMatrix) -> Matrix {
    let k = space.len();
    let svecs: Vec<Vec<f64>> = space.basis.iter().map(|b| b.to_svec()).collect();
    let mut data = vec![0.0; k * k];
    for j in 0..k {
        let img = t(&space.basis[j]).to_svec();
        for i in 0..k {
            data[i * k + j] = vector::dot(&svecs[i], &img);
        }
    }
    Matrix::new(k, data).expect("finite compression")
}

fn certify(
    u: &Matrix,
    lambda: f64,
    witness: SymmetricMatrix,
    iterations: usize,
    opts: &SpectralOptions,
) -> Result<SpectralCertificate> {
    let threshold = opts.certificate_tol * (1.0 + u.inf_norm());
    if lambda <= opts.engine.tol {
        let sigma = min_singular_value(u);
        if sigma <= threshold {
            return Ok(SpectralCertificate {
                lambda_sq: lambda,
                eigenvalue: 0.0,
                witness_form: witness,
                sigma_min_minus: sigma,
                sigma_min_plus: sigma,
                ambiguous: false,
                iterations,
            });
        }
    }
    let root = lambda.max(0.0).sqrt();
    let sigma_minus = min_singular_value(&u.shifted(-root));
    let sigma_plus = min_singular_value(&u.shifted(root));
    let (eigenvalue, ambiguous) = match (sigma_minus <= threshold, sigma_plus <= threshold) {
        (true, true) => (root, true),
        (true, false) => (root, false),
        (false, true) => (-root, false),
        (false, false) => {
            return Err(Error::CertificateFailed {
                sigma: sigma_minus.min(sigma_plus),
                threshold,
            })
        }
    };
    Ok(SpectralCertificate {
        lambda_sq: lambda,
        eigenvalue,
        witness_form: witness,
        sigma_min_minus: sigma_minus,
        sigma_min_plus: sigma_plus,
        ambiguous,
        iterations,
    })
}

/// An eigenvalue of `u` from the fixed point of `f ↦ u² f` on the PSD
/// part of the commutant, seeded at `I/d`.
pub fn spectral_eigenvalue(u: &SymmetricMatrix, opts: &SpectralOptions) -> Result<SpectralCertificate> {
    let d = u.dim();
    let um = u.as_matrix();
    let space = commutant_selfadjoint_basis(u);
    let u2 = um.matmul(um);
    let map = compress(&space, |f| SymmetricMatrix::symmetrize(&u2.matmul(f.as_matrix())));
    let seed = SymmetricMatrix::identity(d).scaled(1.0 / d as f64);
    let cone = SubspacePsd::new(&space, &seed);
    let fp = birkhoff_eigenvector(&map, &cone, &opts.engine)?;
    let witness = space.combine(&fp.vector);
    certify(um, fp.eigenvalue, witness, fp.iterations, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormPathCertificate {
    #[serde(flatten)]
    pub certificate: SpectralCertificate,
    /// Dimension of the radical (kernel) of the fixed form `S`.
    pub radical_dim: usize,
    /// `‖S (u² − λ I)‖_F`: zero when the range of `u² − λ I` lies in the radical.
    pub radical_defect: f64,
}

/// The same certificate through forms: the cone is the PSD part of
/// `{S : S u = uᵀ S}` under `S ↦ uᵀ S u`, seeded at the metric.
pub fn invariant_form_path(
    u: &Matrix,
    metric: &SymmetricMatrix,
    opts: &SpectralOptions,
) -> Result<FormPathCertificate> {
    let d = u.dim();
    if metric.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: metric.dim(),
        });
    }
    let mu = metric.as_matrix().matmul(u);
    let defect = mu.sub(&mu.transpose()).frobenius_norm();
    let scale = 1.0 + metric.frobenius_norm() * u.frobenius_norm();
    if defect > 1e-10 * scale {
        return Err(Error::NotSelfadjoint { defect });
    }
    crate::linalg::cholesky(metric)?;
    let space = twisted_commutator_kernel(u);
    let map = compress(&space, |s| congruence_action(s, u));
    let seed = metric.scaled(1.0 / metric.trace());
    let cone = SubspacePsd::new(&space, &seed);
    let fp = birkhoff_eigenvector(&map, &cone, &opts.engine)?;
    let form = space.combine(&fp.vector);
    let u2 = u.matmul(u).shifted(-fp.eigenvalue);
    let radical_defect = form.as_matrix().matmul(&u2).frobenius_norm();
    let radical_dim = kernel_basis(form.as_matrix(), 1e-8 * form.trace().abs().max(1e-300)).dim();
    let certificate = certify(u, fp.eigenvalue, form, fp.iterations, opts)?;
    Ok(FormPathCertificate {
        certificate,
        radical_dim,
        radical_defect,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    /// `‖Q Λ Qᵀ − u‖_F`
    pub fn reconstruction_error(&self, u: &SymmetricMatrix) -> f64 {
        let q = &self.eigenvectors;
        let ql = q.matmul(&Matrix::from_diagonal(&self.eigenvalues));
        ql.matmul(&q.transpose()).sub(u.as_matrix()).frobenius_norm()
    }
}

/// Full diagonalization by deflation: certify one eigenvalue of the
/// compression to the current subspace, split off the eigenvectors, and
/// continue on their orthogonal complement.
pub fn eigen_decomposition(u: &SymmetricMatrix, opts: &SpectralOptions) -> Result<EigenDecomposition> {
    let d = u.dim();
    let um = u.as_matrix();
    // orthonormal basis of the part not yet diagonalized
    let mut w: Vec<Vec<f64>> = (0..d).map(|i| vector::unit(d, i)).collect();
    let mut values = Vec::with_capacity(d);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(d);
    while !w.is_empty() {
        let k = w.len();
        let images: Vec<Vec<f64>> = w.iter().map(|x| um.mul_vec(x)).collect();
        let mut b = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                b[i * k + j] = vector::dot(&w[i], &images[j]);
            }
        }
        let b = SymmetricMatrix::symmetrize(&Matrix::new(k, b)?);
        let cert = spectral_eigenvalue(&b, opts).map_err(|e| e.context("deflation step"))?;
        let shifted = b.as_matrix().shifted(-cert.eigenvalue);
        let (sigma, fallback) = min_singular_pair(&shifted);
        let tol = (1e-12 * (1.0 + b.frobenius_norm())).max(4.0 * sigma);
        let ker = kernel_basis(&shifted, tol);
        let local: Vec<Vec<f64>> = if ker.is_trivial() {
            vec![fallback]
        } else {
            ker.basis().to_vec()
        };
        for z in &local {
            let mut v = vec![0.0; d];
            for (zi, wi) in z.iter().zip(&w) {
                vector::axpy(*zi, wi, &mut v);
            }
            let v = vector::normalized(&v).expect("unit combination");
            values.push(vector::dot(&v, &um.mul_vec(&v)));
            vectors.push(v);
        }
        let (_, rest) = span_and_complement(k, &local, 1e-12);
        w = rest
            .iter()
            .map(|c| {
                let mut v = vec![0.0; d];
                for (ci, wi) in c.iter().zip(&w) {
                    vector::axpy(*ci, wi, &mut v);
                }
                v
            })
            .collect();
        w = reorthogonalize(&w, &vectors);
    }
    let mut data = vec![0.0; d * d];
    for (j, v) in vectors.iter().enumerate() {
        for i in 0..d {
            data[i * d + j] = v[i];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: values,
        eigenvectors: Matrix::new(d, data)?,
    })
}

/// One more Gram–Schmidt pass of `w` against `done` and itself.
fn reorthogonalize(w: &[Vec<f64>], done: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(w.len());
    for x in w {
        let mut y = x.clone();
        for q in done.iter().chain(out.iter()) {
            let c = vector::dot(q, &y);
            vector::axpy(-c, q, &mut y);
        }
        out.push(vector::normalized(&y).unwrap_or(y));
    }
    out
}
