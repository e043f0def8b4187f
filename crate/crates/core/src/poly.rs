//! Real polynomials with ascending coefficient order.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::vector;

/// Remainder-to-dividend ratio below which a Euclidean remainder counts as zero.
pub const DEFAULT_GCD_TOL: f64 = 1e-11;

/// Ratios in `(tol, GCD_AMBIGUITY_BAND·tol]` are reported as ill-conditioned.
pub const GCD_AMBIGUITY_BAND: f64 = 100.0;

/// `coefficients[k]` multiplies `t^k`. Trailing zeros are trimmed, so the
/// last stored coefficient is the leading one (unless the polynomial is zero,
/// which is stored as `[0.0]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    /// Like [`Polynomial::new`] but rejects non-finite coefficients.
    pub fn try_new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("coefficient {k} is not finite")));
        }
        Ok(Polynomial::new(coeffs))
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(1.0)
    }

    /// Monic `t − root`.
    pub fn linear(root: f64) -> Self {
        Polynomial::new(vec![-root, 1.0])
    }

    /// Monic `t² + b t + c`.
    pub fn quadratic(b: f64, c: f64) -> Self {
        Polynomial::new(vec![c, b, 1.0])
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Polynomial::one(), |acc, r| &acc * &Polynomial::linear(*r))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn monic(&self) -> Result<Polynomial> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let lc = self.leading();
        let mut c: Vec<f64> = self.coeffs.iter().map(|x| x / lc).collect();
        let n = c.len();
        c[n - 1] = 1.0;
        Ok(Polynomial { coeffs: c })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `(p(t), p'(t))` by Horner.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for c in self.coeffs.iter().rev() {
            dp = dp * t + p;
            p = p * t + c;
        }
        (p, dp)
    }

    /// Sum of `|a_k| |t|^k`: the scale of rounding errors in `eval(t)`.
    pub fn eval_magnitude(&self, t: f64) -> f64 {
        let at = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * at + c.abs())
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::constant(0.0);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Polynomial {
        Polynomial::new(vector::scaled(&self.coeffs, s))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn pow(&self, k: usize) -> Polynomial {
        (0..k).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        vector::norm(&self.coeffs)
    }

    pub fn norm_inf(&self) -> f64 {
        vector::norm_inf(&self.coeffs)
    }

    /// Quotient and remainder of division by `divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let dn = divisor.degree();
        if self.degree() < dn || self.is_zero() {
            return Ok((Polynomial::constant(0.0), self.clone()));
        }
        let lc = divisor.leading();
        let mut rem = self.coeffs.clone();
        let qn = self.degree() - dn;
        let mut q = vec![0.0; qn + 1];
        for k in (0..=qn).rev() {
            let c = rem[k + dn] / lc;
            q[k] = c;
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
            rem[k + dn] = 0.0;
        }
        rem.truncate(dn.max(1));
        Ok((Polynomial::new(q), Polynomial::new(rem)))
    }

    pub fn rem(&self, divisor: &Polynomial) -> Result<Polynomial> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Quotient `p / factor`, discarding the remainder.
    ///
    /// Chooses forward division when the factor's roots are small
    /// (`|f(0)| ≤ |lc(f)|`) and ascending division from the constant
    /// term otherwise, which keeps deflation by large roots stable.
    pub fn deflate(&self, factor: &Polynomial) -> Result<Polynomial> {
        if factor.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f0 = factor.coeff(0);
        if f0.abs() <= factor.leading().abs() || factor.degree() == 0 {
            return Ok(self.div_rem(factor)?.0);
        }
        let n = self.degree();
        let m = factor.degree();
        if n < m {
            return Ok(Polynomial::constant(0.0));
        }
        // ascending (power-series) division: the quotient is fixed from the
        // constant term upward and the remainder is pushed to the top
        let qn = n - m;
        let f = factor.coeffs();
        let mut rem = self.coeffs.clone();
        let mut q = vec![0.0; qn + 1];
        for k in 0..=qn {
            let c = rem[k] / f[0];
            q[k] = c;
            for (j, fj) in f.iter().enumerate() {
                rem[k + j] -= c * fj;
            }
        }
        Ok(Polynomial::new(q))
    }

    /// `p(t + c)`
    pub fn taylor_shift(&self, c: f64) -> Polynomial {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                a[k] += c * a[k + 1];
            }
        }
        Polynomial::new(a)
    }

    /// `p(s t)`
    pub fn scale_variable(&self, s: f64) -> Polynomial {
        let mut f = 1.0;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * f);
            f *= s;
        }
        Polynomial::new(out)
    }

    /// Cauchy bound `1 + max |a_k / a_d|` on the moduli of the roots.
    pub fn cauchy_bound(&self) -> f64 {
        let lc = self.leading().abs();
        1.0 + self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs() / lc))
    }

    /// Discriminant `b² − 4c` of a monic quadratic `t² + bt + c`.
    pub fn quadratic_discriminant(&self) -> Option<f64> {
        if self.degree() != 2 {
            return None;
        }
        let m = self.monic().ok()?;
        Some(m.coeff(1) * m.coeff(1) - 4.0 * m.coeff(0))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(c: Vec<f64>) -> Result<Self> {
        Polynomial::try_new(c)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

/// Human-readable form in descending powers, e.g. `t^2 + 1.000000t + 1.000000`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[k];
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            let leading = first;
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let power = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            if leading && k > 0 && mag == 1.0 {
                write!(f, "{power}")?;
            } else {
                write!(f, "{mag:.6}{power}")?;
            }
        }
        Ok(())
    }
}

/// Monic gcd by the Euclidean algorithm with monic remainders.
///
/// A remainder `r` of `a mod b` counts as zero when
/// `‖r‖ ≤ tol · ‖a‖`; ratios within [`GCD_AMBIGUITY_BAND`] of the threshold
/// are reported as [`Error::GcdIllConditioned`].
pub fn gcd_thresholded(a: &Polynomial, b: &Polynomial, tol: f64) -> Result<Polynomial> {
    gcd_impl(a, b, tol, true)
}

fn gcd_impl(a: &Polynomial, b: &Polynomial, tol: f64, strict: bool) -> Result<Polynomial> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_zero() {
        return b.monic();
    }
    let (mut a, mut b) = if a.degree() >= b.degree() {
        (a.monic()?, b.monic()?)
    } else {
        (b.monic()?, a.monic()?)
    };
    loop {
        if b.degree() == 0 {
            return Ok(Polynomial::one());
        }
        let r = a.rem(&b)?;
        let scale = a.norm();
        let ratio = r.norm() / scale;
        if ratio <= tol {
            return Ok(b);
        }
        if strict && ratio <= tol * GCD_AMBIGUITY_BAND {
            let alt = gcd_impl(&b, &trim_negligible(&r, scale), tol, false)?;
            return Err(Error::GcdIllConditioned {
                ratio,
                degree_if_zero: b.degree(),
                degree_if_nonzero: alt.degree(),
            });
        }
        let r = trim_negligible(&r, scale);
        a = b;
        b = r.monic()?;
    }
}

/// Drops leading coefficients that are pure rounding noise relative to `scale`.
fn trim_negligible(r: &Polynomial, scale: f64) -> Polynomial {
    let mut c = r.coeffs().to_vec();
    while c.len() > 1 && c[c.len() - 1].abs() <= 16.0 * f64::EPSILON * scale {
        c.pop();
    }
    Polynomial::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_degree() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Polynomial::new(vec![]).degree(), 0);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn division_by_linear_and_quadratic() {
        // t^3 - 1 = (t - 1)(t^2 + t + 1)
        let p = Polynomial::new(vec![-1.0, 0.0, 0.0, 1.0]);
        let (q, r) = p.div_rem(&Polynomial::linear(1.0)).unwrap();
        assert_eq!(q.coeffs(), &[1.0, 1.0, 1.0]);
        assert!(r.is_zero());
        let (q, r) = p.div_rem(&Polynomial::quadratic(1.0, 1.0)).unwrap();
        assert_eq!(q.coeffs(), &[-1.0, 1.0]);
        assert!(r.is_zero());
    }

    #[test]
    fn backward_deflation_matches_forward() {
        // roots 5 and 0.5: deflating by t - 5 goes through the reversed path
        let p = Polynomial::from_roots(&[5.0, 0.5, -2.0]);
        let q = p.deflate(&Polynomial::linear(5.0)).unwrap();
        let expect = Polynomial::from_roots(&[0.5, -2.0]);
        for (a, b) in q.coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_and_scale() {
        let p = Polynomial::from_roots(&[1.0, 2.0]);
        // p(t + 1) has roots 0 and 1
        assert_eq!(p.taylor_shift(1.0).coeffs(), &[0.0, -1.0, 1.0]);
        // p(2t) has roots 1/2 and 1
        let s = p.scale_variable(2.0);
        assert_eq!(s.eval(0.5), 0.0);
        assert_eq!(s.eval(1.0), 0.0);
    }

    #[test]
    fn gcd_detects_common_factor() {
        let p = &Polynomial::from_roots(&[1.0, 1.0]) * &Polynomial::linear(-2.0);
        let g = gcd_thresholded(&p, &p.derivative(), DEFAULT_GCD_TOL).unwrap();
        assert_eq!(g.degree(), 1);
        assert!((g.coeff(0) + 1.0).abs() < 1e-12);
        let sq = Polynomial::quadratic(0.0, 1.0);
        let g = gcd_thresholded(&sq, &sq.derivative(), DEFAULT_GCD_TOL).unwrap();
        assert_eq!(g.degree(), 0);
    }

    #[test]
    fn gcd_reports_ambiguity() {
        // roots 1 and 1 + 3e-5: the first remainder is tiny but not negligible
        let p = Polynomial::from_roots(&[1.0, 1.0 + 3e-5]);
        let err = gcd_thresholded(&p, &p.derivative(), 1e-11).unwrap_err();
        match err {
            Error::GcdIllConditioned {
                degree_if_zero,
                degree_if_nonzero,
                ..
            } => {
                assert_eq!(degree_if_zero, 1);
                assert_eq!(degree_if_nonzero, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn display_descending() {
        let p = Polynomial::quadratic(1.0, 1.0);
        assert_eq!(p.to_string(), "t^2 + 1.000000t + 1.000000");
        assert_eq!(Polynomial::linear(1.0).to_string(), "t - 1.000000");
        assert_eq!(Polynomial::new(vec![0.0, 0.0, -1.0]).to_string(), "-t^2");
    }
}
