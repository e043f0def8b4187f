//! Independent referee: Sturm sequences, bisection and brute force.
//!
//! Nothing in this module calls the cone engine, the spectral solver or the
//! factorization pipeline; it only reads the factorization's output type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{char_poly, kernel_basis, Matrix, SymmetricMatrix};
use crate::poly::{gcd_thresholded, Polynomial, DEFAULT_GCD_TOL, GCD_AMBIGUITY_BAND};
use crate::polyfactor::FactorList;

/// Largest matrix dimension the spectrum oracle accepts.
pub const ORACLE_MAX_DIM: usize = 10;

/// `psd_check` declares `S` PSD when its smallest eigenvalue is at least `−PSD_CHECK_TOL`.
pub const PSD_CHECK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    /// `p(lo)` and `p(hi)` have opposite signs.
    pub sign_change: bool,
    pub refined_root: f64,
}

/// Negated-remainder sequence `p, p′, −rem(p, p′), …`, each entry scaled to
/// a unit leading coefficient.
struct SturmSequence {
    seq: Vec<Polynomial>,
}

impl SturmSequence {
    fn new(p: &Polynomial) -> Result<Self> {
        let p0 = unit_leading(p);
        let mut seq = vec![p0.clone()];
        if p0.degree() == 0 {
            return Ok(SturmSequence { seq });
        }
        seq.push(unit_leading(&p0.derivative()));
        loop {
            let n = seq.len();
            let (a, b) = (&seq[n - 2], &seq[n - 1]);
            if b.degree() == 0 {
                break;
            }
            let r = a.rem(b)?;
            let r = trim(&r, 64.0 * f64::EPSILON * a.norm_inf().max(b.norm_inf()));
            if r.is_zero() {
                break;
            }
            seq.push(unit_leading(&r.scaled(-1.0)));
        }
        Ok(SturmSequence { seq })
    }

    fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for q in &self.seq {
            let v = q.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: f64, b: f64) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

fn unit_leading(p: &Polynomial) -> Polynomial {
    let lc = p.leading().abs();
    if lc == 0.0 {
        p.clone()
    } else {
        p.scaled(1.0 / lc)
    }
}

fn trim(p: &Polynomial, floor: f64) -> Polynomial {
    let mut c = p.coeffs().to_vec();
    while c.len() > 1 && c[c.len() - 1].abs() <= floor {
        c.pop();
    }
    if c.iter().all(|x| x.abs() <= floor) {
        return Polynomial::constant(0.0);
    }
    Polynomial::new(c)
}

fn too_narrow(lo: f64, hi: f64) -> bool {
    hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300)
}

/// Disjoint brackets, one per distinct real root of `p` in `[lo, hi]`,
/// each refined by bisection.
pub fn sturm_isolate(p: &Polynomial, lo: f64, hi: f64) -> Result<Vec<RootBracket>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
    }
    let sturm = SturmSequence::new(p)?;
    let mut out = Vec::new();
    if p.eval(lo) == 0.0 {
        out.push(RootBracket {
            lo,
            hi: lo,
            sign_change: false,
            refined_root: lo,
        });
    }
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let n = sturm.count(a, b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(refine(p, &sturm, a, b));
            continue;
        }
        if too_narrow(a, b) {
            return Err(Error::IntervalTooSmall { at: 0.5 * (a + b) });
        }
        let m = 0.5 * (a + b);
        stack.push((m, b));
        stack.push((a, m));
    }
    out.sort_by(|x, y| x.refined_root.total_cmp(&y.refined_root));
    Ok(out)
}

fn refine(p: &Polynomial, sturm: &SturmSequence, lo: f64, hi: f64) -> RootBracket {
    let sign_change = p.eval(lo) * p.eval(hi) < 0.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..400 {
        if too_narrow(a, b) {
            break;
        }
        let m = 0.5 * (a + b);
        let left = if sign_change {
            let fm = p.eval(m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            (fm > 0.0) != (p.eval(a) > 0.0)
        } else {
            sturm.count(a, m) == 1
        };
        if left {
            b = m;
        } else {
            a = m;
        }
    }
    RootBracket {
        lo,
        hi,
        sign_change,
        refined_root: 0.5 * (a + b),
    }
}

/// Thresholded gcd that settles an ambiguous remainder instead of failing:
/// `merge` counts it as zero (a multiple root), otherwise as nonzero.
fn settled_gcd(a: &Polynomial, b: &Polynomial, merge: bool) -> Result<Polynomial> {
    let mut tol = DEFAULT_GCD_TOL;
    loop {
        match gcd_thresholded(a, b, tol) {
            Err(Error::GcdIllConditioned { ratio, .. }) if merge && tol < 1e-6 => {
                tol = ratio * 1.0001;
            }
            Err(Error::GcdIllConditioned { ratio, .. }) if !merge && ratio > 1e-15 => {
                tol = ratio / (GCD_AMBIGUITY_BAND * 1.0001);
            }
            other => return other,
        }
    }
}

/// Real roots of `p` with multiplicities, ascending.
///
/// Distinct roots come from Sturm isolation of the squarefree part on the
/// Cauchy interval. The chain `g₀ = p`, `gₖ₊₁ = gcd(gₖ, gₖ′)` gives the
/// multiplicities: every root of the squarefree part of `gₖ` raises the
/// multiplicity of the nearest distinct root by one. Near-multiple roots
/// are kept apart.
pub fn real_roots_with_multiplicity(p: &Polynomial) -> Result<Vec<(f64, usize)>> {
    roots_with_policy(p, false)
}

fn roots_with_policy(p: &Polynomial, merge: bool) -> Result<Vec<(f64, usize)>> {
    let mut g = p.monic()?;
    let mut roots: Vec<(f64, usize)> = Vec::new();
    let mut level = 0;
    while g.degree() > 0 {
        let h = if g.degree() == 1 {
            Polynomial::one()
        } else {
            settled_gcd(&g, &g.derivative(), merge)?
        };
        let sq = if h.degree() == 0 { g.clone() } else { g.div_rem(&h)?.0 };
        let b = sq.cauchy_bound();
        let found = sturm_isolate(&sq, -b, b)?;
        for br in found {
            let r = br.refined_root;
            if level == 0 {
                roots.push((r, 1));
            } else if let Some(best) = roots
                .iter_mut()
                .min_by(|x, y| (x.0 - r).abs().total_cmp(&(y.0 - r).abs()))
            {
                best.1 += 1;
            }
        }
        if level == 0 && roots.is_empty() {
            break;
        }
        g = h;
        level += 1;
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(roots)
}

/// All eigenvalues of a symmetric matrix with multiplicity, ascending,
/// from its characteristic polynomial.
pub fn symmetric_spectrum_oracle(u: &SymmetricMatrix) -> Result<Vec<f64>> {
    let d = u.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: ORACLE_MAX_DIM,
        });
    }
    let c = char_poly(u.as_matrix())?;
    // A symmetric matrix has only real eigenvalues, so a short count means
    // a cluster was split into complex pairs; merging then recovers it.
    let mut last = 0;
    for merge in [false, true] {
        let mut out = Vec::with_capacity(d);
        for (r, m) in roots_with_policy(&c, merge)? {
            out.extend(std::iter::repeat_n(r, m));
        }
        if out.len() == d {
            return Ok(out);
        }
        last = out.len();
    }
    Err(Error::Numerical(format!("oracle located {last} of {d} eigenvalues")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eig_bound: f64,
}

pub fn psd_check(s: &SymmetricMatrix) -> Result<PsdCheck> {
    let spec = symmetric_spectrum_oracle(s)?;
    let min = spec.first().copied().unwrap_or(0.0);
    Ok(PsdCheck {
        is_psd: min >= -PSD_CHECK_TOL,
        min_eig_bound: min,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantCheck {
    pub factor: usize,
    pub degree: usize,
    /// `b² − 4c` for quadratic factors.
    pub discriminant: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// `max_k |e_k − p_k| / max(|p_k|, 1e−8‖p‖_∞)` for the expansion `e`.
    pub deviation: f64,
    pub degree_matches: bool,
    pub factors: Vec<DiscriminantCheck>,
}

impl FactorizationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.degree_matches && self.deviation <= tol && self.factors.iter().all(|f| f.ok)
    }
}

/// Expands `fl` and compares it with `p` coefficient by coefficient.
pub fn verify_factorization(p: &Polynomial, fl: &FactorList) -> FactorizationReport {
    let mut e = Polynomial::constant(fl.scale);
    for f in &fl.factors {
        for _ in 0..f.multiplicity {
            e = &e * &f.coeffs;
        }
    }
    let n = e.coeffs().len().max(p.coeffs().len());
    let floor = (1e-8 * p.norm_inf()).max(f64::MIN_POSITIVE);
    let deviation = (0..n)
        .map(|k| (e.coeff(k) - p.coeff(k)).abs() / p.coeff(k).abs().max(floor))
        .fold(0.0, f64::max);
    let factors = fl
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let g = &f.coeffs;
            let disc = if g.degree() == 2 {
                let b = g.coeff(1) / g.leading();
                let c = g.coeff(0) / g.leading();
                Some(b * b - 4.0 * c)
            } else {
                None
            };
            let ok = match g.degree() {
                1 => true,
                2 => disc.is_some_and(|d| d < 0.0),
                _ => false,
            };
            DiscriminantCheck {
                factor: i,
                degree: g.degree(),
                discriminant: disc,
                ok,
            }
        })
        .collect();
    FactorizationReport {
        deviation,
        degree_matches: e.degree() == p.degree(),
        factors,
    }
}

/// A real eigenvalue of `S ↦ uᵀSu` on 2×2 symmetric matrices with its
/// eigenspace and, when one exists, a PSD member of trace one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongruenceFixedPoint {
    pub eigenvalue: f64,
    /// Orthonormal basis of the eigenspace in `(s₁₁, s₂₂, √2·s₁₂)` coordinates.
    pub eigenspace: Vec<[f64; 3]>,
    pub psd_form: Option<SymmetricMatrix>,
    /// The eigenspace is all of the symmetric matrices.
    pub full_space: bool,
}

impl CongruenceFixedPoint {
    /// Distance from `s` (trace-normalized) to the eigenspace.
    pub fn distance(&self, s: &SymmetricMatrix) -> f64 {
        let v = coords(&s.scaled(1.0 / s.trace()));
        let mut r = v;
        for b in &self.eigenspace {
            let k = r[0] * b[0] + r[1] * b[1] + r[2] * b[2];
            for i in 0..3 {
                r[i] -= k * b[i];
            }
        }
        (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
    }
}

fn coords(s: &SymmetricMatrix) -> [f64; 3] {
    let m = s.as_matrix();
    [m[(0, 0)], m[(1, 1)], std::f64::consts::SQRT_2 * m[(0, 1)]]
}

fn from_coords(v: &[f64]) -> SymmetricMatrix {
    let o = v[2] / std::f64::consts::SQRT_2;
    SymmetricMatrix::from_rows(&[vec![v[0], o], vec![o, v[1]]]).expect("2x2")
}

/// Smallest eigenvalue of a 2×2 symmetric matrix in closed form.
fn min_eig_2x2(v: &[f64]) -> f64 {
    let (a, c, b) = (v[0], v[1], v[2] / std::f64::consts::SQRT_2);
    0.5 * (a + c) - (0.25 * (a - c) * (a - c) + b * b).sqrt()
}

/// Every PSD direction `S` with `uᵀSu = λS` for a 2×2 `u`, by enumerating
/// the real eigenvalues of the 3×3 congruence matrix.
pub fn brute_force_cone_fixed_points(u: &Matrix) -> Result<Vec<CongruenceFixedPoint>> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    // columns: images of the orthonormal basis e₁₁, e₂₂, (e₁₂+e₂₁)/√2
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut data = vec![0.0; 9];
    for (j, b) in basis.iter().enumerate() {
        let s = from_coords(b);
        let img = u.transpose().matmul(s.as_matrix()).matmul(u);
        let img = SymmetricMatrix::symmetrize(&img);
        let c = coords(&img);
        for i in 0..3 {
            data[i * 3 + j] = c[i];
        }
    }
    let q = Matrix::new(3, data)?;
    let c = char_poly(&q)?;
    let scale = 1.0 + q.frobenius_norm();
    let mut out = Vec::new();
    for (lambda, _) in real_roots_with_multiplicity(&c)? {
        let k = kernel_basis(&q.shifted(-lambda), 1e-7 * scale);
        let eigenspace: Vec<[f64; 3]> = k.basis().iter().map(|b| [b[0], b[1], b[2]]).collect();
        if eigenspace.is_empty() {
            continue;
        }
        let psd_form = best_psd_member(&eigenspace);
        if psd_form.is_none() {
            continue;
        }
        out.push(CongruenceFixedPoint {
            eigenvalue: lambda,
            full_space: eigenspace.len() == 3,
            eigenspace,
            psd_form,
        });
    }
    Ok(out)
}

/// The trace-one member of the span with the largest smallest eigenvalue,
/// found by sweeping unit directions; `None` when no member is PSD.
fn best_psd_member(span: &[[f64; 3]]) -> Option<SymmetricMatrix> {
    let mut candidates: Vec<[f64; 3]> = Vec::new();
    match span.len() {
        1 => {
            candidates.push(span[0]);
            candidates.push([-span[0][0], -span[0][1], -span[0][2]]);
        }
        2 => {
            for k in 0..7200 {
                let th = k as f64 * std::f64::consts::PI / 3600.0;
                let (s, c) = th.sin_cos();
                candidates.push([
                    c * span[0][0] + s * span[1][0],
                    c * span[0][1] + s * span[1][1],
                    c * span[0][2] + s * span[1][2],
                ]);
            }
        }
        _ => candidates.push([0.5, 0.5, 0.0]),
    }
    let mut best: Option<([f64; 3], f64)> = None;
    for v in candidates {
        let tr = v[0] + v[1];
        if tr <= 1e-12 {
            continue;
        }
        let w = [v[0] / tr, v[1] / tr, v[2] / tr];
        let m = min_eig_2x2(&w);
        if m >= -1e-9 && best.as_ref().is_none_or(|(_, bm)| m > *bm) {
            best = Some((w, m));
        }
    }
    best.map(|(w, _)| from_coords(&w))
}
