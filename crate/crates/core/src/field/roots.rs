//! Real and complex embeddings of `Q[x]/(f)`.
//!
//! All roots are located with Aberth-Ehrlich simultaneous iteration in `f64`,
//! split into real and non-real by an exact Sturm count, then polished one at a
//! time by Newton's method in fixed point until the Newton step drops below
//! `eps_root`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::poly::{real_root_count, IntPolynomial};
use crate::error::{OtError, Result};
use crate::fixed::{Fixed, FixedComplex};

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const DEFAULT_EPS_ROOT: f64 = 1e-30;

const ABERTH_MAX_ITER: usize = 500;
const NEWTON_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingSet {
    pub s: usize,
    pub t: usize,
    pub precision_bits: u32,
    pub eps_root: f64,
    #[serde(skip)]
    poly: IntPolynomial,
    #[serde(skip)]
    fixed_roots: Vec<FixedComplex>,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    roots: Vec<Complex64>,
}

impl EmbeddingSet {
    /// Roots in embedding order: `s` real roots ascending, then `t` roots with
    /// positive imaginary part, then their conjugates in matching order.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn fixed_roots(&self) -> &[FixedComplex] {
        &self.fixed_roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Number of complex coordinates `s + t` of `H^s x C^t`.
    pub fn m(&self) -> usize {
        self.s + self.t
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    /// Values `sum_k c_k root_i^k` at full working precision.
    pub fn embed_fixed(&self, coeffs: &[BigInt]) -> Vec<FixedComplex> {
        let bits = self.precision_bits;
        let cs: Vec<FixedComplex> = coeffs.iter().map(|c| FixedComplex::from_int(c, bits)).collect();
        self.fixed_roots
            .iter()
            .map(|r| {
                cs.iter()
                    .rev()
                    .fold(FixedComplex::zero(bits), |acc, c| &(&acc * r) + c)
            })
            .collect()
    }

    pub fn embed(&self, coeffs: &[BigInt]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.embed_fixed(coeffs).iter().map(FixedComplex::to_c64).collect();
        for z in out.iter_mut().take(self.s) {
            z.im = 0.0;
        }
        out
    }

    /// Fast `f64` evaluation from the rounded roots; for screening only.
    pub fn embed_f64(&self, coeffs: &[i64]) -> Vec<Complex64> {
        self.roots
            .iter()
            .map(|&r| coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * r + c as f64))
            .collect()
    }

    /// Largest coefficient error of `prod (x - root_i)` against `f`.
    pub fn reconstruction_error(&self) -> f64 {
        let bits = self.precision_bits;
        let mut prod = vec![FixedComplex::from_int(&BigInt::from(1), bits)];
        for r in &self.fixed_roots {
            let mut next = vec![FixedComplex::zero(bits); prod.len() + 1];
            for (k, c) in prod.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * r);
            }
            prod = next;
        }
        prod.iter()
            .zip(self.poly.coeffs())
            .map(|(p, c)| (p - &FixedComplex::from_int(c, bits)).norm1().to_f64())
            .fold(0.0, f64::max)
    }

    /// Recomputes the roots at `bits` of precision, tightening the Newton
    /// tolerance by the same factor.
    pub fn with_precision(&self, bits: u32) -> Result<EmbeddingSet> {
        let eps = if bits > self.precision_bits {
            self.eps_root * 2f64.powi(-((bits - self.precision_bits) as i32))
        } else {
            self.eps_root
        };
        check_tolerance(eps, bits)?;
        let eps_fixed = Fixed::from_f64(eps, bits);
        let coeffs = self.poly.coeffs();
        let mut roots: Vec<FixedComplex> = Vec::with_capacity(self.degree());
        for (i, r) in self.fixed_roots.iter().enumerate() {
            let start = r.with_bits(bits);
            let refined = if i < self.s {
                FixedComplex::real(newton_real(coeffs, start.re, &eps_fixed)?)
            } else if i < self.s + self.t {
                newton_complex(coeffs, start, &eps_fixed)?
            } else {
                roots[i - self.t].conj()
            };
            roots.push(refined);
        }
        Ok(EmbeddingSet::assemble(self.poly.clone(), self.s, self.t, bits, eps, roots))
    }

    fn assemble(poly: IntPolynomial, s: usize, t: usize, bits: u32, eps: f64, fixed_roots: Vec<FixedComplex>) -> Self {
        let roots = fixed_roots.iter().map(FixedComplex::to_c64).collect();
        EmbeddingSet { s, t, precision_bits: bits, eps_root: eps, poly, fixed_roots, roots }
    }
}

fn check_tolerance(eps: f64, bits: u32) -> Result<()> {
    if !(eps > 0.0) || eps < 2f64.powi(-(bits as i32 - 8)) {
        return Err(OtError::ToleranceBelowPrecision { eps, bits });
    }
    Ok(())
}

/// Aberth-Ehrlich iteration for all roots of a monic polynomial.
pub(crate) fn aberth_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn horner_real(coeffs: &[BigInt], x: &Fixed) -> (Fixed, Fixed) {
    let bits = x.bits();
    let mut p = Fixed::zero(bits);
    let mut dp = Fixed::zero(bits);
    for c in coeffs.iter().rev() {
        dp = &(&dp * x) + &p;
        p = &(&p * x) + &Fixed::from_int(c, bits);
    }
    (p, dp)
}

fn horner_complex(coeffs: &[BigInt], z: &FixedComplex) -> (FixedComplex, FixedComplex) {
    let bits = z.bits();
    let mut p = FixedComplex::zero(bits);
    let mut dp = FixedComplex::zero(bits);
    for c in coeffs.iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + &FixedComplex::from_int(c, bits);
    }
    (p, dp)
}

fn newton_real(coeffs: &[BigInt], mut x: Fixed, eps: &Fixed) -> Result<Fixed> {
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = horner_real(coeffs, &x);
        if dp.is_zero() {
            return Err(OtError::ConvergenceFailure("vanishing derivative at a real root".into()));
        }
        let step = p.div(&dp);
        x = &x - &step;
        if step.abs().mantissa() < eps.mantissa() {
            // one extra step squares the remaining error
            let (p, dp) = horner_real(coeffs, &x);
            if !dp.is_zero() {
                x = &x - &p.div(&dp);
            }
            return Ok(x);
        }
    }
    Err(OtError::ConvergenceFailure(format!("real Newton refinement exceeded {NEWTON_MAX_ITER} steps")))
}

fn newton_complex(coeffs: &[BigInt], mut z: FixedComplex, eps: &Fixed) -> Result<FixedComplex> {
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = horner_complex(coeffs, &z);
        if dp.re.is_zero() && dp.im.is_zero() {
            return Err(OtError::ConvergenceFailure("vanishing derivative at a complex root".into()));
        }
        let step = p.div(&dp);
        z = &z - &step;
        if step.norm1().mantissa() < eps.mantissa() {
            let (p, dp) = horner_complex(coeffs, &z);
            if !(dp.re.is_zero() && dp.im.is_zero()) {
                z = &z - &p.div(&dp);
            }
            return Ok(z);
        }
    }
    Err(OtError::ConvergenceFailure(format!("complex Newton refinement exceeded {NEWTON_MAX_ITER} steps")))
}

pub fn compute_embeddings(poly: &IntPolynomial, bits: u32, eps_root: f64) -> Result<EmbeddingSet> {
    check_tolerance(eps_root, bits)?;
    let n = poly.degree();
    let real_count = real_root_count(poly.coeffs());
    let s = real_count;
    let t = (n - real_count) / 2;
    if s == 0 || t == 0 {
        return Err(OtError::SignatureUnsupported { s, t });
    }
    let approx_coeffs: Vec<f64> = poly
        .coeffs()
        .iter()
        .map(|c| num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN))
        .collect();
    let mut approx = aberth_roots(&approx_coeffs);
    approx.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let eps = Fixed::from_f64(eps_root, bits);

    let mut reals = Vec::with_capacity(s);
    for z in &approx[..s] {
        reals.push(newton_real(poly.coeffs(), Fixed::from_f64(z.re, bits), &eps)?);
    }
    reals.sort_by(|a, b| a.mantissa().cmp(b.mantissa()));
    let upper: Vec<&Complex64> = approx[s..].iter().filter(|z| z.im > 0.0).collect();
    if upper.len() != t {
        return Err(OtError::ConvergenceFailure(format!(
            "expected {t} roots in the upper half plane, found {}",
            upper.len()
        )));
    }
    let mut complex = Vec::with_capacity(t);
    for z in upper {
        let r = newton_complex(poly.coeffs(), FixedComplex::from_c64(*z, bits), &eps)?;
        if !r.im.mantissa().is_positive() {
            return Err(OtError::ConvergenceFailure("complex root collapsed onto the real axis".into()));
        }
        complex.push(r);
    }
    complex.sort_by(|a, b| {
        a.re.mantissa().cmp(b.re.mantissa()).then(a.im.mantissa().cmp(b.im.mantissa()))
    });

    let mut roots: Vec<FixedComplex> = reals.into_iter().map(FixedComplex::real).collect();
    roots.extend(complex.iter().cloned());
    roots.extend(complex.iter().map(FixedComplex::conj));

    let separation = Fixed::from_f64((eps_root * 1e3).min(1e-6), bits);
    for i in 0..n {
        for j in i + 1..n {
            if (&roots[i] - &roots[j]).norm1().mantissa() <= separation.mantissa() {
                return Err(OtError::ConvergenceFailure(format!("roots {i} and {j} coincide")));
            }
        }
    }
    Ok(EmbeddingSet::assemble(poly.clone(), s, t, bits, eps_root, roots))
}
