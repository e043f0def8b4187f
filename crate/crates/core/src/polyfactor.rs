//! Real factorization into irreducible pieces of degree one and two.
//!
//! A squarefree monic `p` is turned into its companion matrix `u`. A PSD
//! form `S` with `uᵀSu = λS` is found on the cone. When `S` has a kernel,
//! the kernel is `u`-invariant and gives a factor. Otherwise `u/√λ` is an
//! isometry of `S`, and an eigenspace of `u + u⁻¹` gives the factor (or
//! shows that `p` is an irreducible quadratic).

use serde::{Deserialize, Serialize};

use crate::birkhoff::{psd_invariant_form, EngineOptions};
use crate::error::{Error, Result};
use crate::linalg::{
    char_poly, cholesky, inverse, kernel_basis, min_singular_pair, psd_within, Matrix,
    Subspace, SymmetricMatrix,
};
use crate::poly::{gcd_thresholded, Polynomial, DEFAULT_GCD_TOL};
use crate::spectral::{spectral_eigenvalue, SpectralOptions};

/// Kernel threshold for `S`, relative to `trace(S)`.
pub const ISOTROPY_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorOptions {
    pub spectral: SpectralOptions,
    /// Relative tolerance of the invariance and divisibility checks.
    pub subspace_tol: f64,
    pub gcd_tol: f64,
    pub polish_iters: usize,
    /// Shifted restarts after a failed attempt.
    pub retries: usize,
    /// Accepted relative deviation of the reconstructed squarefree part.
    pub accept_tol: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            spectral: SpectralOptions::default(),
            subspace_tol: 1e-6,
            gcd_tol: DEFAULT_GCD_TOL,
            polish_iters: 60,
            retries: 4,
            accept_tol: 1e-10,
        }
    }
}

impl FactorOptions {
    pub fn with_engine(engine: EngineOptions) -> Self {
        FactorOptions {
            spectral: SpectralOptions {
                engine,
                ..SpectralOptions::default()
            },
            ..FactorOptions::default()
        }
    }
}

/// Matrix of multiplication by `t` on `R[t]/(p)` in the basis `1, t, …`.
pub fn companion_matrix(p: &Polynomial) -> Result<Matrix> {
    let m = p.monic()?;
    let d = m.degree();
    if d == 0 {
        return Err(Error::InvalidInput("companion matrix needs degree ≥ 1".into()));
    }
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        if i + 1 < d {
            data[(i + 1) * d + i] = 1.0;
        }
        data[i * d + d - 1] = -m.coeff(i);
    }
    Matrix::new(d, data)
}

/// Yun's algorithm: `p = Π aᵢ^i` with squarefree, pairwise coprime monic `aᵢ`.
pub fn squarefree_decomposition(p: &Polynomial, tol: f64) -> Result<Vec<(Polynomial, usize)>> {
    let p = p.monic()?;
    if p.degree() == 0 {
        return Err(Error::InvalidInput("polynomial must have degree ≥ 1".into()));
    }
    if p.degree() == 1 {
        return Ok(vec![(p, 1)]);
    }
    let dp = p.derivative();
    let a = gcd_thresholded(&p, &dp, tol)?;
    if a.degree() == 0 {
        return Ok(vec![(p, 1)]);
    }
    let mut b = p.div_rem(&a)?.0;
    let mut c = dp.div_rem(&a)?.0;
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree() > 0 {
        let ai = if d.norm() <= tol * c.norm().max(1.0) {
            b.monic()?
        } else {
            gcd_thresholded(&b, &d, tol)?
        };
        if ai.degree() > 0 {
            out.push((ai.clone(), i));
        }
        let next_b = b.div_rem(&ai)?.0;
        c = d.div_rem(&ai)?.0;
        d = c.sub(&next_b.derivative());
        b = next_b;
        i += 1;
    }
    Ok(out)
}

/// `{x : xᵀSx = 0}` for PSD `S`; a subspace by Cauchy–Schwarz.
pub fn isotropy_kernel(s: &SymmetricMatrix, tol: f64) -> Result<Subspace> {
    psd_within(s, tol).map_err(|pivot| Error::NotPsd { pivot })?;
    Ok(kernel_basis(s.as_matrix(), tol))
}

/// Characteristic polynomial of `u` restricted to the invariant subspace `w`,
/// checked to divide `p`.
pub fn invariant_subspace_to_factor(
    u: &Matrix,
    w: &Subspace,
    p: &Polynomial,
    tol: f64,
) -> Result<Polynomial> {
    if w.is_trivial() || w.dim() >= p.degree() {
        return Err(Error::InvalidInput(format!(
            "subspace dimension {} must lie strictly between 0 and {}",
            w.dim(),
            p.degree()
        )));
    }
    let defect = w.invariance_defect(u);
    if defect > tol * u.frobenius_norm().max(1.0) {
        return Err(Error::NotInvariant { defect });
    }
    let g = char_poly(&w.compress(u).expect("nontrivial subspace"))?;
    check_divides(p, &g, tol)?;
    Ok(g)
}

/// Characteristic polynomial of the map induced by `u` on `R^d / w`,
/// realized as the compression to the orthogonal complement.
pub fn quotient_factor(u: &Matrix, w: &Subspace) -> Result<Polynomial> {
    let z = w.complement();
    match z.compress(u) {
        Some(c) => char_poly(&c),
        None => Ok(Polynomial::one()),
    }
}

fn check_divides(p: &Polynomial, g: &Polynomial, tol: f64) -> Result<()> {
    let r = p.rem(g)?.norm();
    if r > tol * p.norm() {
        return Err(Error::NotADivisor { remainder: r });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitOutcome {
    Split {
        g: Polynomial,
        h: Polynomial,
    },
    IrreducibleCertificate {
        polynomial: Polynomial,
        alpha: Option<f64>,
        lambda: Option<f64>,
    },
}

/// Which step of the splitting procedure produced the outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Degree one.
    Linear,
    /// Degree two with real roots, split by the quadratic formula.
    RealQuadratic,
    /// `S` is singular; its kernel is the invariant subspace.
    IsotropyKernel,
    /// `S` is definite; a proper eigenspace of `M + Mᵀ` is the invariant subspace.
    Eigenspace,
    /// `S` is definite and `M + Mᵀ = α I`.
    Certificate,
    /// Degree two with complex roots where the cone pipeline failed; closed form used.
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitTrace {
    pub degree: usize,
    pub branch: Branch,
    pub lambda: Option<f64>,
    /// The invariant form, when the cone pipeline ran.
    pub form: Option<SymmetricMatrix>,
    /// `‖MᵀM − I‖_F` for the whitened, rescaled companion (definite case only).
    pub isometry_defect: Option<f64>,
    pub alpha: Option<f64>,
}

impl SplitTrace {
    fn plain(degree: usize, branch: Branch) -> Self {
        SplitTrace {
            degree,
            branch,
            lambda: None,
            form: None,
            isometry_defect: None,
            alpha: None,
        }
    }

    /// The definite branch ran: `S` was positive definite and `u/√λ` an isometry.
    pub fn definite_branch(&self) -> bool {
        self.isometry_defect.is_some()
    }
}

pub fn split_once(p: &Polynomial, opts: &FactorOptions) -> Result<SplitOutcome> {
    split_once_traced(p, opts).map(|(o, _)| o)
}

/// One step of the splitting procedure, with a record of the branch taken.
pub fn split_once_traced(p: &Polynomial, opts: &FactorOptions) -> Result<(SplitOutcome, SplitTrace)> {
    let p = p.monic()?;
    let d = p.degree();
    if d == 0 {
        return Err(Error::InvalidInput("polynomial must have degree ≥ 1".into()));
    }
    if d == 1 {
        return Ok((certificate(p, None, None), SplitTrace::plain(1, Branch::Linear)));
    }
    if d == 2 {
        let disc = p.quadratic_discriminant().expect("degree 2");
        if disc >= 0.0 {
            let (g, h) = real_quadratic_roots(&p);
            return Ok((
                SplitOutcome::Split { g, h },
                SplitTrace::plain(2, Branch::RealQuadratic),
            ));
        }
        // Run the cone pipeline anyway so the certificate carries (α, λ).
        return match cone_split(&p, opts) {
            Ok((SplitOutcome::IrreducibleCertificate { alpha, lambda, .. }, trace)) => {
                Ok((certificate(p, alpha, lambda), trace))
            }
            _ => {
                let lambda = p.coeff(0);
                let alpha = -p.coeff(1) / lambda.sqrt();
                Ok((
                    certificate(p, Some(alpha), Some(lambda)),
                    SplitTrace {
                        lambda: Some(lambda),
                        alpha: Some(alpha),
                        ..SplitTrace::plain(2, Branch::ClosedForm)
                    },
                ))
            }
        };
    }
    cone_split(&p, opts)
}

fn certificate(p: Polynomial, alpha: Option<f64>, lambda: Option<f64>) -> SplitOutcome {
    SplitOutcome::IrreducibleCertificate {
        polynomial: p,
        alpha,
        lambda,
    }
}

/// Roots of a monic quadratic with nonnegative discriminant, without cancellation.
fn real_quadratic_roots(p: &Polynomial) -> (Polynomial, Polynomial) {
    let b = p.coeff(1);
    let c = p.coeff(0);
    let sq = (b * b - 4.0 * c).max(0.0).sqrt();
    let big = -0.5 * (b + b.signum() * sq);
    if big == 0.0 {
        return (Polynomial::linear(0.0), Polynomial::linear(0.0));
    }
    (Polynomial::linear(big), Polynomial::linear(c / big))
}

/// Diagonal similarity `D⁻¹ A D` by powers of two that equalizes row and
/// column norms (Parlett–Reinsch). Exact in floating point, and it leaves
/// the characteristic polynomial unchanged.
fn balance(a: &Matrix) -> Matrix {
    let d = a.dim();
    let mut m = a.as_slice().to_vec();
    loop {
        let mut done = true;
        for i in 0..d {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..d {
                if j != i {
                    c += m[j * d + i].abs();
                    r += m[i * d + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                f *= 2.0;
                c *= 4.0;
            }
            while c > r * 2.0 {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * total {
                done = false;
                for j in 0..d {
                    m[i * d + j] /= f;
                    m[j * d + i] *= f;
                }
            }
        }
        if done {
            return Matrix::new(d, m).expect("same shape");
        }
    }
}

fn cone_split(p: &Polynomial, opts: &FactorOptions) -> Result<(SplitOutcome, SplitTrace)> {
    let d = p.degree();
    // the companion in a rescaled basis of R[t]/(p); same operator
    let u = balance(&companion_matrix(p)?);
    let inv = psd_invariant_form(&u, &opts.spectral.engine)?;
    let s = inv.form;
    let lambda = inv.eigenvalue;
    let mut trace = SplitTrace {
        degree: d,
        branch: Branch::IsotropyKernel,
        lambda: Some(lambda),
        form: Some(s.clone()),
        isometry_defect: None,
        alpha: None,
    };
    let kernel = isotropy_kernel(&s, ISOTROPY_TOL * s.trace())?;
    if !kernel.is_trivial() {
        let g = invariant_subspace_to_factor(&u, &kernel, p, opts.subspace_tol)?;
        let h = cofactor(p, &g, opts.subspace_tol)?;
        return Ok((SplitOutcome::Split { g, h }, trace));
    }

    // definite branch: w = u/√λ preserves S
    if lambda <= ISOTROPY_TOL {
        return Err(Error::Numerical(format!(
            "definite invariant form with eigenvalue {lambda:e}"
        )));
    }
    let w = u.scaled(1.0 / lambda.sqrt());
    let l = cholesky(&s)?;
    let l_inv_t = inverse(&l.transpose())?;
    // with y = Lᵀx the form becomes |y|² and w becomes M = Lᵀ w L⁻ᵀ
    let m = l.transpose().matmul(&w).matmul(&l_inv_t);
    let defect = m
        .transpose()
        .matmul(&m)
        .sub(&Matrix::identity(d))
        .frobenius_norm();
    let m_plus = SymmetricMatrix::symmetrize(&m.add(&m.transpose()));
    let cert = spectral_eigenvalue(&m_plus, &opts.spectral)?;
    let alpha = cert.eigenvalue;
    trace.isometry_defect = Some(defect);
    trace.alpha = Some(alpha);

    let shifted = m_plus.shifted(-alpha);
    let ktol = 1e-6 * (1.0 + m_plus.frobenius_norm());
    let mut v = kernel_basis(shifted.as_matrix(), ktol);
    if v.is_trivial() {
        let (_, y) = min_singular_pair(shifted.as_matrix());
        v = Subspace::span_of(d, &[y]);
    }
    if v.dim() < d {
        trace.branch = Branch::Eigenspace;
        let pulled: Vec<Vec<f64>> = v.basis().iter().map(|y| l_inv_t.mul_vec(y)).collect();
        let v = Subspace::span_of(d, &pulled);
        let g = invariant_subspace_to_factor(&u, &v, p, opts.subspace_tol)?;
        let h = cofactor(p, &g, opts.subspace_tol)?;
        return Ok((SplitOutcome::Split { g, h }, trace));
    }
    if d >= 3 {
        return Err(Error::InconsistentDimension { degree: d });
    }
    trace.branch = Branch::Certificate;
    Ok((certificate(p.clone(), Some(alpha), Some(lambda)), trace))
}

fn cofactor(p: &Polynomial, g: &Polynomial, tol: f64) -> Result<Polynomial> {
    let h = p.deflate(g)?;
    let r = (g * &h).sub(p).norm();
    if r > tol * p.norm() {
        return Err(Error::NotADivisor { remainder: r });
    }
    Ok(h)
}

/// The quadratic `t² − α√λ t + λ` annihilated by `u` when `u + λu⁻¹ = α√λ`.
pub fn certificate_quadratic(alpha: f64, lambda: f64) -> Polynomial {
    Polynomial::quadratic(-alpha * lambda.sqrt(), lambda)
}

/// Newton refinement of a linear or quadratic factor `g` of `p`.
///
/// Linear factors are refined by Newton's method on the root, quadratic
/// ones by Bairstow's method on `(b, c)` with the remainder `p mod g` as
/// residual. The best iterate is returned.
pub fn polish_factor(p: &Polynomial, g: &Polynomial, iters: usize) -> Result<Polynomial> {
    let g = g.monic()?;
    match g.degree() {
        1 => polish_linear(p, -g.coeff(0), iters).map(Polynomial::linear),
        2 => polish_quadratic(p, g.coeff(1), g.coeff(0), iters)
            .map(|(b, c)| Polynomial::quadratic(b, c)),
        k => Err(Error::InvalidInput(format!(
            "only factors of degree 1 or 2 can be polished (got {k})"
        ))),
    }
}

/// Rounding level of a residual computed near modulus `rho`.
fn noise_floor(p: &Polynomial, rho: f64) -> f64 {
    8.0 * f64::EPSILON * p.eval_magnitude(rho)
}

fn polish_linear(p: &Polynomial, mut r: f64, iters: usize) -> Result<f64> {
    let target = 1e-12 * p.norm();
    let mut best = (p.eval(r).abs(), r);
    let mut prev = best.0;
    let mut growth = 0;
    for _ in 0..iters {
        if best.0 <= target.min(noise_floor(p, r)) || best.0 == 0.0 {
            break;
        }
        let (v, dv) = p.eval_with_derivative(r);
        if dv == 0.0 {
            break;
        }
        let next = r - v / dv;
        let res = p.eval(next).abs();
        if !res.is_finite() {
            break;
        }
        if res < best.0 {
            best = (res, next);
        }
        if res > prev && res > noise_floor(p, next) {
            growth += 1;
            if growth >= 3 {
                return Err(Error::Diverged { remainder: res });
            }
        } else {
            growth = 0;
        }
        if next == r {
            break;
        }
        prev = res;
        r = next;
    }
    Ok(best.1)
}

fn polish_quadratic(p: &Polynomial, mut b: f64, mut c: f64, iters: usize) -> Result<(f64, f64)> {
    if p.degree() < 2 {
        return Err(Error::InvalidInput("polynomial degree below the factor's".into()));
    }
    let target = 1e-12 * p.norm();
    let g = Polynomial::quadratic(b, c);
    let (mut q, r) = p.div_rem(&g)?;
    let mut res = r.norm();
    let mut best = (res, b, c);
    let mut growth = 0;
    let t = Polynomial::new(vec![0.0, 1.0]);
    for _ in 0..iters {
        let rho = c.abs().sqrt();
        if best.0 <= target.min(noise_floor(p, rho)) || best.0 == 0.0 {
            break;
        }
        let g = Polynomial::quadratic(b, c);
        let (_, r) = p.div_rem(&g)?;
        // ∂R/∂c = −(q mod g), ∂R/∂b = −(t q mod g)
        let jc = q.rem(&g)?;
        let jb = (&t * &q).rem(&g)?;
        let (a11, a21) = (-jb.coeff(0), -jb.coeff(1));
        let (a12, a22) = (-jc.coeff(0), -jc.coeff(1));
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let (r0, r1) = (r.coeff(0), r.coeff(1));
        let db = -(r0 * a22 - a12 * r1) / det;
        let dc = -(a11 * r1 - a21 * r0) / det;
        let (nb, nc) = (b + db, c + dc);
        let g_next = Polynomial::quadratic(nb, nc);
        let (q_next, r_next) = p.div_rem(&g_next)?;
        let next_res = r_next.norm();
        if !next_res.is_finite() {
            break;
        }
        if next_res < best.0 {
            best = (next_res, nb, nc);
        }
        if next_res > res && next_res > noise_floor(p, nc.abs().sqrt()) {
            growth += 1;
            if growth >= 3 {
                return Err(Error::Diverged { remainder: next_res });
            }
        } else {
            growth = 0;
        }
        if nb == b && nc == c {
            break;
        }
        b = nb;
        c = nc;
        q = q_next;
        res = next_res;
    }
    Ok((best.1, best.2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub coeffs: Polynomial,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorList {
    /// Leading coefficient of the input.
    pub scale: f64,
    pub factors: Vec<Factor>,
}

impl FactorList {
    /// `scale · Π fᵢ^mᵢ`
    pub fn expand(&self) -> Polynomial {
        self.factors.iter().fold(Polynomial::constant(self.scale), |acc, f| {
            &acc * &f.coeffs.pow(f.multiplicity)
        })
    }

    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.coeffs.degree() * f.multiplicity)
            .sum()
    }
}

impl std::fmt::Display for FactorList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.scale != 1.0 || self.factors.is_empty() {
            write!(f, "{}", self.scale)?;
        }
        for fac in &self.factors {
            write!(f, "({})", fac.coeffs)?;
            if fac.multiplicity > 1 {
                write!(f, "^{}", fac.multiplicity)?;
            }
        }
        Ok(())
    }
}

/// Everything the factorization did, for inspection and testing.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FactorTrace {
    pub splits: Vec<SplitTrace>,
    /// Errors of attempts that were discarded and retried.
    pub discarded: Vec<String>,
    pub inconsistent_dimension: usize,
}

pub fn factor_completely(p: &Polynomial, opts: &FactorOptions) -> Result<FactorList> {
    factor_completely_traced(p, opts).map(|(f, _)| f)
}

/// Squarefree decomposition, then recursive splitting of each part, with
/// every leaf polished against its part before the product is checked.
pub fn factor_completely_traced(
    p: &Polynomial,
    opts: &FactorOptions,
) -> Result<(FactorList, FactorTrace)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(Error::InvalidInput("polynomial must have degree ≥ 1".into()));
    }
    let scale = p.leading();
    let monic = p.monic()?;
    // power-of-two variable scaling keeps the roots near the unit disc exactly
    let s = variable_scale(&monic, 1.0);
    let scaled = monic.scale_variable(s).monic()?;
    let parts = squarefree_decomposition(&scaled, opts.gcd_tol).map_err(|e| e.context("squarefree decomposition"))?;
    let mut trace = FactorTrace::default();
    let mut factors = Vec::new();
    for (k, (part, mult)) in parts.iter().enumerate() {
        let leaves = factor_squarefree(part, opts, &mut trace)
            .map_err(|e| e.context(format!("squarefree part {k} (multiplicity {mult})")))?;
        for leaf in leaves {
            let back = leaf.scale_variable(1.0 / s).monic()?;
            factors.push(Factor {
                coeffs: back,
                multiplicity: *mult,
            });
        }
    }
    factors.sort_by(|a, b| {
        a.coeffs
            .degree()
            .cmp(&b.coeffs.degree())
            .then_with(|| {
                a.coeffs
                    .coeffs()
                    .partial_cmp(b.coeffs.coeffs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok((FactorList { scale, factors }, trace))
}

/// Estimate of the largest root modulus from four Graeffe root-squaring
/// steps, accurate to a factor `d^(1/16)`.
fn dominant_modulus(p: &Polynomial) -> f64 {
    const STEPS: i32 = 4;
    let d = p.degree();
    let mut a: Vec<f64> = p.monic().map(|m| m.coeffs().to_vec()).unwrap_or_else(|_| vec![1.0]);
    // log of an accumulated normalization keeps the coefficients in range
    let mut log_scale = 0.0;
    for _ in 0..STEPS {
        let mut b = vec![0.0; d + 1];
        for k in 0..=d {
            let mut acc = a[k] * a[k];
            let mut j = 1;
            while j <= k.min(d - k) {
                let term = 2.0 * a[k - j] * a[k + j];
                acc += if j % 2 == 1 { -term } else { term };
                j += 1;
            }
            b[k] = if (d - k) % 2 == 1 { -acc } else { acc };
        }
        let lead = b[d];
        for c in b.iter_mut() {
            *c /= lead;
        }
        // rescale the variable so the coefficients stay bounded
        let m = (1..=d)
            .map(|j| b[d - j].abs().powf(1.0 / j as f64))
            .fold(0.0f64, f64::max);
        if m > 0.0 && m.is_finite() {
            let mut f = 1.0;
            for k in (0..=d).rev() {
                b[k] /= f;
                f *= m;
            }
            log_scale = 2.0 * log_scale + m.ln();
        } else {
            log_scale *= 2.0;
        }
        a = b;
    }
    let m = (1..=d)
        .map(|j| a[d - j].abs().powf(1.0 / j as f64))
        .fold(0.0f64, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    ((m.ln() + log_scale) / 2f64.powi(STEPS)).exp()
}

/// Power of two nearest to `dominant_modulus(p) / target`.
fn variable_scale(p: &Polynomial, target: f64) -> f64 {
    let r = dominant_modulus(p);
    if !(r > 0.0 && r.is_finite()) {
        return 1.0;
    }
    2f64.powi((r / target).log2().round() as i32)
}

/// Target modulus of the largest root of each piece before splitting. At
/// modulus one a dominant conjugate pair at argument `θ` loses its
/// oscillating part at the rate `cos θ`, the best the shifted iteration
/// allows.
const PIECE_MODULUS: f64 = 1.0;

/// Whole-polynomial shifts tried when the polished leaves do not
/// reconstruct the input well enough.
const RETRY_SHIFTS: [f64; 2] = [0.1234, -0.2345];

fn factor_squarefree(
    q: &Polynomial,
    opts: &FactorOptions,
    trace: &mut FactorTrace,
) -> Result<Vec<Polynomial>> {
    let mut best: Option<(f64, Vec<Polynomial>)> = None;
    for shift in std::iter::once(0.0).chain(RETRY_SHIFTS) {
        let (dev, leaves) = attempt_squarefree(q, shift, opts, trace)?;
        if dev <= opts.accept_tol {
            return Ok(leaves);
        }
        trace
            .discarded
            .push(format!("reconstruction deviation {dev:e} (shift {shift})"));
        if best.as_ref().is_none_or(|(b, _)| dev < *b) {
            best = Some((dev, leaves));
        }
    }
    match best {
        // close enough to be useful; verification reports the deviation
        Some((dev, leaves)) if dev <= 1e-6 => Ok(leaves),
        Some((dev, _)) => Err(Error::Numerical(format!(
            "best reconstruction deviation {dev:e} after {} attempts",
            RETRY_SHIFTS.len() + 1
        ))),
        None => unreachable!("at least one attempt runs"),
    }
}

/// Splits one piece, retrying numerical failures on Taylor-shifted copies.
///
/// Shifting to the root centroid makes the roots far from the centre
/// dominant; they tend to have large arguments, which the iteration
/// resolves quickly. After a non-convergence the iteration budget grows.
fn split_piece(
    p: &Polynomial,
    opts: &FactorOptions,
    trace: &mut FactorTrace,
    path: &str,
) -> Result<SplitOutcome> {
    let d = p.degree();
    let r = dominant_modulus(p);
    let centroid = -p.coeff(d - 1) / (d as f64 * p.leading());
    let shifts = [0.0, centroid, centroid + 0.5 * r, centroid - 0.5 * r, 0.5 * r];
    let mut o = opts.clone();
    let mut last: Option<Error> = None;
    for &c in shifts.iter().take(opts.retries + 1) {
        match last.as_ref().map(Error::root) {
            Some(Error::NonConvergence { .. }) if o.spectral.engine.max_iter < 64 * opts.spectral.engine.max_iter => {
                o.spectral.engine.max_iter *= 4
            }
            Some(Error::InconsistentDimension { .. }) => o.spectral.engine.tol /= 10.0,
            _ => {}
        }
        let pc = if c == 0.0 { p.clone() } else { p.taylor_shift(c) };
        let s = if d >= 2 { variable_scale(&pc, PIECE_MODULUS) } else { 1.0 };
        let ps = pc.scale_variable(s).monic()?;
        match split_once_traced(&ps, &o) {
            Ok((outcome, t)) => {
                trace.splits.push(t);
                let back = |f: Polynomial| -> Result<Polynomial> {
                    let f = f.scale_variable(1.0 / s).monic()?;
                    Ok(if c == 0.0 { f } else { f.taylor_shift(-c) })
                };
                return Ok(match outcome {
                    SplitOutcome::Split { g, h } => SplitOutcome::Split {
                        g: back(g)?,
                        h: back(h)?,
                    },
                    SplitOutcome::IrreducibleCertificate {
                        polynomial,
                        alpha,
                        lambda,
                    } => SplitOutcome::IrreducibleCertificate {
                        polynomial: back(polynomial)?,
                        alpha,
                        lambda,
                    },
                });
            }
            Err(e) => {
                // the subspace was computed here, so a failed invariance
                // check is rounding rather than bad input
                let e = match e {
                    Error::NotInvariant { defect } => Error::Numerical(format!(
                        "computed subspace not invariant (defect {defect:e})"
                    )),
                    e => e,
                };
                if matches!(e, Error::InconsistentDimension { .. }) {
                    trace.inconsistent_dimension += 1;
                }
                trace.discarded.push(format!("{path}: {e} (shift {c})"));
                if !e.is_numerical() {
                    return Err(e.context(format!("split at {path}")));
                }
                last = Some(e);
            }
        }
    }
    Err(last
        .expect("at least one attempt runs")
        .context(format!("split at {path}")))
}

/// One full splitting of `q(t + shift)`, mapped back and polished against `q`.
fn attempt_squarefree(
    q: &Polynomial,
    shift: f64,
    opts: &FactorOptions,
    trace: &mut FactorTrace,
) -> Result<(f64, Vec<Polynomial>)> {
    let shifted = if shift == 0.0 { q.clone() } else { q.taylor_shift(shift) };
    let mut stack = vec![(shifted, String::from("root"))];
    let mut raw = Vec::new();
    while let Some((p, path)) = stack.pop() {
        match split_piece(&p, opts, trace, &path)? {
            SplitOutcome::IrreducibleCertificate { polynomial, .. } => raw.push(polynomial),
            SplitOutcome::Split { g, h } => {
                stack.push((h, format!("{path}/h")));
                stack.push((g, format!("{path}/g")));
            }
        }
    }
    let mut leaves = Vec::with_capacity(raw.len());
    for leaf in raw {
        let back = if shift == 0.0 {
            leaf
        } else {
            leaf.taylor_shift(-shift)
        };
        let polished = match polish_factor(q, &back, opts.polish_iters) {
            Ok(g) => g,
            Err(Error::Diverged { .. }) => back,
            Err(e) => return Err(e),
        };
        if polished.degree() == 2 && polished.quadratic_discriminant().unwrap_or(-1.0) >= 0.0 {
            let (a, b) = real_quadratic_roots(&polished);
            for r in [a, b] {
                leaves.push(polish_factor(q, &r, opts.polish_iters).unwrap_or(r));
            }
        } else {
            leaves.push(polished);
        }
    }
    let product = leaves.iter().fold(Polynomial::one(), |acc, f| &acc * f);
    let dev = relative_deviation(&product, q);
    Ok((dev, leaves))
}

/// `max_k |a_k − b_k| / max(|b_k|, ‖b‖_∞·ε^½)` over the coefficients.
pub fn relative_deviation(a: &Polynomial, b: &Polynomial) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    let floor = b.norm_inf() * 1e-8;
    (0..n)
        .map(|k| (a.coeff(k) - b.coeff(k)).abs() / b.coeff(k).abs().max(floor).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// `re ± i·im` with `im > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePair {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub real: Vec<RealRoot>,
    pub pairs: Vec<ConjugatePair>,
}

impl RootReport {
    /// Real roots plus twice the pairs, with multiplicity.
    pub fn count(&self) -> usize {
        self.real.iter().map(|r| r.multiplicity).sum::<usize>()
            + 2 * self.pairs.iter().map(|p| p.multiplicity).sum::<usize>()
    }
}

pub fn roots(p: &Polynomial, opts: &FactorOptions) -> Result<RootReport> {
    Ok(roots_of(&factor_completely(p, opts)?))
}

pub fn roots_of(fl: &FactorList) -> RootReport {
    let mut real = Vec::new();
    let mut pairs = Vec::new();
    for f in &fl.factors {
        let g = &f.coeffs;
        if g.degree() == 1 {
            real.push(RealRoot {
                value: -g.coeff(0) / g.leading() + 0.0,
                multiplicity: f.multiplicity,
            });
            continue;
        }
        let re = -g.coeff(1) / 2.0 + 0.0;
        let im_sq = g.coeff(0) - re * re;
        if im_sq > 0.0 {
            pairs.push(ConjugatePair {
                re,
                im: im_sq.sqrt(),
                multiplicity: f.multiplicity,
            });
        } else {
            real.push(RealRoot {
                value: re,
                multiplicity: 2 * f.multiplicity,
            });
        }
    }
    real.sort_by(|a, b| a.value.total_cmp(&b.value));
    RootReport { real, pairs }
}
