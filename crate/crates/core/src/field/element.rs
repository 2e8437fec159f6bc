use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::{resultant, validate_polynomial, IntPolynomial};
use super::roots::{compute_embeddings, EmbeddingSet, DEFAULT_EPS_ROOT, DEFAULT_PRECISION_BITS};
use crate::error::{OtError, Result};
use crate::fixed::FixedComplex;

/// Element `c_0 + c_1 a + ... + c_{n-1} a^{n-1}` of the order `Z[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlgebraicInt {
    #[serde(serialize_with = "crate::report::ser_bigints")]
    coeffs: Vec<BigInt>,
}

impl AlgebraicInt {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        AlgebraicInt { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        AlgebraicInt { coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect() }
    }

    pub fn constant(c: i64, n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs[0] = BigInt::from(c);
        AlgebraicInt { coeffs }
    }

    /// `a^k` for the field generator `a`, `k < n`.
    pub fn basis(k: usize, n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n];
        coeffs[k] = BigInt::one();
        AlgebraicInt { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Largest coefficient in absolute value.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn l1(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

impl fmt::Display for AlgebraicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Add for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn add(self, rhs: &AlgebraicInt) -> AlgebraicInt {
        debug_assert_eq!(self.dim(), rhs.dim());
        AlgebraicInt { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn sub(self, rhs: &AlgebraicInt) -> AlgebraicInt {
        debug_assert_eq!(self.dim(), rhs.dim());
        AlgebraicInt { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn neg(self) -> AlgebraicInt {
        AlgebraicInt { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions {
    pub precision_bits: u32,
    pub eps_root: f64,
    pub assume_irreducible: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            precision_bits: DEFAULT_PRECISION_BITS,
            eps_root: DEFAULT_EPS_ROOT,
            assume_irreducible: false,
        }
    }
}

/// `K = Q[x]/(f)` with its embeddings; arithmetic is in the order `Z[a]`.
#[derive(Debug, Clone)]
pub struct NumberField {
    poly: IntPolynomial,
    embeddings: EmbeddingSet,
}

impl NumberField {
    pub fn new(coeffs: &[i64], opts: FieldOptions) -> Result<Self> {
        let poly = validate_polynomial(coeffs, opts.assume_irreducible)?;
        let embeddings = compute_embeddings(&poly, opts.precision_bits, opts.eps_root)?;
        Ok(NumberField { poly, embeddings })
    }

    pub fn from_parts(poly: IntPolynomial, embeddings: EmbeddingSet) -> Self {
        NumberField { poly, embeddings }
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn embeddings(&self) -> &EmbeddingSet {
        &self.embeddings
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn s(&self) -> usize {
        self.embeddings.s
    }

    pub fn t(&self) -> usize {
        self.embeddings.t
    }

    pub fn m(&self) -> usize {
        self.embeddings.m()
    }

    /// Same field with roots recomputed at `bits` of precision.
    pub fn with_precision(&self, bits: u32) -> Result<NumberField> {
        Ok(NumberField { poly: self.poly.clone(), embeddings: self.embeddings.with_precision(bits)? })
    }

    pub fn zero(&self) -> AlgebraicInt {
        AlgebraicInt::constant(0, self.degree())
    }

    pub fn one(&self) -> AlgebraicInt {
        AlgebraicInt::constant(1, self.degree())
    }

    pub fn generator(&self) -> AlgebraicInt {
        AlgebraicInt::basis(1, self.degree())
    }

    pub fn element(&self, coeffs: &[i64]) -> Result<AlgebraicInt> {
        if coeffs.len() != self.degree() {
            return Err(OtError::DimensionMismatch(self.degree()));
        }
        Ok(AlgebraicInt::from_i64s(coeffs))
    }

    /// Product reduced modulo the monic defining polynomial.
    pub fn mul(&self, a: &AlgebraicInt, b: &AlgebraicInt) -> AlgebraicInt {
        let n = self.degree();
        let f = self.poly.coeffs();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for (j, fj) in f.iter().take(n).enumerate() {
                prod[k - n + j] -= &c * fj;
            }
        }
        prod.truncate(n);
        AlgebraicInt { coeffs: prod }
    }

    /// `a^k`; negative exponents go through [`NumberField::inverse`].
    pub fn pow(&self, a: &AlgebraicInt, k: i64) -> Result<AlgebraicInt> {
        let base = if k < 0 { self.inverse(a)? } else { a.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Exact norm as the resultant `Res(f, a(x))`.
    pub fn norm_resultant(&self, a: &AlgebraicInt) -> BigInt {
        resultant(self.poly.coeffs(), &a.coeffs)
    }

    /// Exact norm, cross-checked against the rounded product of embeddings.
    pub fn norm_exact(&self, a: &AlgebraicInt) -> Result<BigInt> {
        let exact = self.norm_resultant(a);
        let approx = self.norm_float(a);
        let exact_f = exact.to_f64().unwrap_or(f64::INFINITY);
        if !((exact_f - approx).abs() < 0.5f64.max(exact_f.abs() * 1e-12)) {
            return Err(OtError::CrossCheckMismatch { exact: exact.to_string(), approx });
        }
        Ok(exact)
    }

    /// Product of all embeddings, evaluated at working precision.
    pub fn norm_float(&self, a: &AlgebraicInt) -> f64 {
        let values = self.embeddings.embed_fixed(&a.coeffs);
        let bits = self.embeddings.precision_bits;
        let prod = values
            .iter()
            .fold(FixedComplex::from_int(&BigInt::one(), bits), |acc, v| &acc * v);
        prod.re.to_f64()
    }

    pub fn embed(&self, a: &AlgebraicInt) -> Vec<Complex64> {
        self.embeddings.embed(&a.coeffs)
    }

    pub fn embed_fixed(&self, a: &AlgebraicInt) -> Vec<FixedComplex> {
        self.embeddings.embed_fixed(&a.coeffs)
    }

    /// Inverse in `Z[a]` from the extended Euclidean algorithm over `Q[x]`.
    pub fn inverse(&self, a: &AlgebraicInt) -> Result<AlgebraicInt> {
        let to_q = |v: &[BigInt]| -> Vec<BigRational> {
            let mut p: Vec<BigRational> = v.iter().map(|c| BigRational::from_integer(c.clone())).collect();
            q_trim(&mut p);
            p
        };
        let mut r0 = to_q(self.poly.coeffs());
        let mut r1 = to_q(&a.coeffs);
        if r1.is_empty() {
            return Err(OtError::NotAUnit);
        }
        // invariant: r_i = s_i * a (mod f)
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (q, r) = q_divrem(&r0, &r1);
            let s2 = q_sub(&s0, &q_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return Err(OtError::NotAUnit);
            }
        }
        let c = r1[0].clone();
        let mut out = Vec::with_capacity(self.degree());
        for k in 0..self.degree() {
            let v = s1.get(k).cloned().unwrap_or_else(BigRational::zero) / &c;
            if !v.is_integer() {
                return Err(OtError::InverseNotInOrder);
            }
            out.push(v.to_integer());
        }
        let inv = AlgebraicInt { coeffs: out };
        debug_assert!(self.mul(a, &inv).is_one());
        Ok(inv)
    }
}

fn q_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn q_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    q_trim(&mut out);
    out
}

fn q_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..len)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(k).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    q_trim(&mut out);
    out
}

fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / &b[db];
        for j in 0..=db {
            let sub = &c * &b[j];
            r[dr - db + j] -= sub;
        }
        q[dr - db] = c;
        r.pop();
        q_trim(&mut r);
    }
    q_trim(&mut q);
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> NumberField {
        NumberField::new(&[-1, -1, 0, 1], FieldOptions::default()).unwrap()
    }

    fn el(c: &[i64]) -> AlgebraicInt {
        AlgebraicInt::from_i64s(c)
    }

    #[test]
    fn multiplication_examples() {
        let k = cubic();
        assert_eq!(k.mul(&el(&[0, 1, 0]), &el(&[0, 0, 1])), el(&[1, 1, 0]));
        let a = el(&[3, -2, 7]);
        assert_eq!(k.mul(&a, &k.one()), a);
        assert_eq!(k.mul(&el(&[1, 1, 0]), &el(&[-1, 1, 0])), el(&[-1, 0, 1]));
    }

    #[test]
    fn embedding_examples() {
        let k = cubic();
        assert!(k.embed(&k.one()).iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let gen = k.embed(&k.generator());
        for (z, r) in gen.iter().zip(k.embeddings().roots()) {
            assert!((z - r).norm() < 1e-15);
        }
        let sq = k.embed(&el(&[0, 0, 1]));
        assert!((sq[0].re - 1.7548776662).abs() < 1e-9);
        assert_eq!(sq[0].im, 0.0);
    }

    #[test]
    fn norm_examples() {
        let k = cubic();
        assert_eq!(k.norm_exact(&k.generator()).unwrap(), BigInt::from(1));
        assert_eq!(k.norm_exact(&AlgebraicInt::constant(2, 3)).unwrap(), BigInt::from(8));
        assert_eq!(k.norm_exact(&el(&[1, 1, 0])).unwrap(), BigInt::from(1));
        assert_eq!(k.norm_exact(&k.zero()).unwrap(), BigInt::zero());
    }

    #[test]
    fn inverse_of_generator() {
        let k = cubic();
        assert_eq!(k.inverse(&k.generator()).unwrap(), el(&[-1, 0, 1]));
        assert_eq!(k.inverse(&AlgebraicInt::constant(2, 3)), Err(OtError::InverseNotInOrder));
        assert_eq!(k.inverse(&k.zero()), Err(OtError::NotAUnit));
        assert_eq!(k.pow(&k.generator(), -2).unwrap(), k.mul(&el(&[-1, 0, 1]), &el(&[-1, 0, 1])));
    }

    #[test]
    fn element_dimension_checked() {
        assert_eq!(cubic().element(&[1, 2]), Err(OtError::DimensionMismatch(3)));
    }
}
