//! Integer polynomials: validation of the defining polynomial, irreducibility
//! search, Sturm counting and exact resultants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{OtError, Result};

/// Degree above which the exhaustive factor search needs an explicit opt-out.
pub const MAX_SEARCH_DEGREE: usize = 8;

/// Monic irreducible integer polynomial, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntPolynomial {
    #[serde(serialize_with = "crate::report::ser_bigints")]
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Euclidean norm squared of the coefficient vector.
    pub fn norm2_sqr(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

pub fn validate_polynomial(coeffs: &[i64], assume_irreducible: bool) -> Result<IntPolynomial> {
    let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    validate_polynomial_big(&big, assume_irreducible)
}

pub fn validate_polynomial_big(coeffs: &[BigInt], assume_irreducible: bool) -> Result<IntPolynomial> {
    let lead = coeffs.last().ok_or(OtError::EmptyPolynomial)?;
    if !lead.is_one() {
        return Err(OtError::NotMonic(lead.to_string()));
    }
    let n = coeffs.len() - 1;
    if n < 3 {
        return Err(OtError::DegreeTooSmall(n));
    }
    if let Some(root) = rational_root(coeffs) {
        let factor = [-root, BigInt::one()];
        return Err(OtError::Reducible(factor.iter().map(|c| c.to_string()).collect()));
    }
    if n > MAX_SEARCH_DEGREE {
        if assume_irreducible {
            return Ok(IntPolynomial { coeffs: coeffs.to_vec() });
        }
        return Err(OtError::IrreducibilityUndecided(n));
    }
    if let Some(factor) = find_monic_factor(coeffs) {
        return Err(OtError::Reducible(factor.iter().map(|c| c.to_string()).collect()));
    }
    Ok(IntPolynomial { coeffs: coeffs.to_vec() })
}

/// Integer root of a monic polynomial, if any. Every rational root of a monic
/// integer polynomial is an integer dividing the constant term.
fn rational_root(coeffs: &[BigInt]) -> Option<BigInt> {
    let c0 = &coeffs[0];
    if c0.is_zero() {
        return Some(BigInt::zero());
    }
    for d in divisors(c0) {
        for cand in [d.clone(), -d] {
            if eval(coeffs, &cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

fn divisors(c: &BigInt) -> Vec<BigInt> {
    let c = c.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= c {
        if (&c % &d).is_zero() {
            out.push(d.clone());
            let other = &c / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exhaustive search for a monic integer factor of degree 2..=n/2.
///
/// A monic factor `g` of `f` satisfies `|g_k| <= C(d, k) * ||f||_2` (Mignotte),
/// its constant term divides `f(0)`, and `g(x0) | f(x0)` at small integers.
pub(crate) fn find_monic_factor(coeffs: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = coeffs.len() - 1;
    let norm_sqr: BigInt = coeffs.iter().map(|c| c * c).sum();
    let probes: Vec<(BigInt, BigInt)> = [-2i64, -1, 1, 2]
        .iter()
        .map(|&x| (BigInt::from(x), eval(coeffs, &BigInt::from(x))))
        .collect();
    for d in 2..=n / 2 {
        let bounds: Vec<BigInt> = (0..d)
            .map(|k| {
                let c = binomial(d, k);
                isqrt(&(&c * &c * &norm_sqr))
            })
            .collect();
        let consts: Vec<BigInt> = divisors(&coeffs[0])
            .into_iter()
            .filter(|v| v <= &bounds[0])
            .flat_map(|v| [v.clone(), -v])
            .collect();
        let mut g = vec![BigInt::zero(); d + 1];
        g[d] = BigInt::one();
        for c0 in &consts {
            g[0] = c0.clone();
            if let Some(found) = search_rec(coeffs, &mut g, 1, &bounds, &probes) {
                return Some(found);
            }
        }
    }
    None
}

fn search_rec(
    f: &[BigInt],
    g: &mut Vec<BigInt>,
    k: usize,
    bounds: &[BigInt],
    probes: &[(BigInt, BigInt)],
) -> Option<Vec<BigInt>> {
    let d = g.len() - 1;
    if k == d {
        for (x, fx) in probes {
            let gx = eval(g, x);
            if gx.is_zero() || !(fx % &gx).is_zero() {
                return None;
            }
        }
        let (_, rem) = div_rem_monic(f, g);
        return if rem.iter().all(Zero::is_zero) { Some(g.clone()) } else { None };
    }
    let b = bounds[k].to_i64().unwrap_or(i64::MAX / 4);
    for v in -b..=b {
        g[k] = BigInt::from(v);
        if let Some(found) = search_rec(f, g, k + 1, bounds, probes) {
            return Some(found);
        }
    }
    None
}

fn isqrt(x: &BigInt) -> BigInt {
    x.sqrt()
}

pub(crate) fn eval(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Quotient and remainder by a monic divisor over Z.
pub(crate) fn div_rem_monic(f: &[BigInt], g: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let dg = g.len() - 1;
    let mut rem = f.to_vec();
    if f.len() <= dg {
        return (vec![BigInt::zero()], rem);
    }
    let mut quot = vec![BigInt::zero(); f.len() - dg];
    for i in (dg..f.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dg] = c.clone();
        for (j, gj) in g.iter().enumerate() {
            rem[i - dg + j] -= &c * gj;
        }
    }
    rem.truncate(dg);
    (quot, rem)
}

fn trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = degree(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r: Vec<BigInt> = a.to_vec();
    trim(&mut r);
    let Some(da) = degree(&r) else { return vec![BigInt::zero()] };
    if da < db {
        return r;
    }
    let mut steps = da - db + 1;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for j in 0..=db {
            r[dr - db + j] -= &lr * &b[j];
        }
        r.truncate(dr);
        if r.is_empty() {
            r.push(BigInt::zero());
        }
        trim(&mut r);
        steps -= 1;
    }
    let scale = num_traits::pow(lb, steps);
    for c in r.iter_mut() {
        *c *= &scale;
    }
    trim(&mut r);
    r
}

/// Resultant `Res(a, b)` by the subresultant pseudo-remainder sequence.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (Some(da0), Some(db0)) = (degree(a), degree(b)) else {
        return BigInt::zero();
    };
    if db0 == 0 {
        return num_traits::pow(b[0].clone(), da0);
    }
    if da0 == 0 {
        return num_traits::pow(a[0].clone(), db0);
    }
    let mut a: Vec<BigInt> = a[..=da0].to_vec();
    let mut b: Vec<BigInt> = b[..=db0].to_vec();
    let ca = content(&a);
    let cb = content(&b);
    for c in a.iter_mut() {
        *c /= &ca;
    }
    for c in b.iter_mut() {
        *c /= &cb;
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    let mut sign = BigInt::one();
    let t = num_traits::pow(ca, db0) * num_traits::pow(cb, da0);
    if da0 < db0 {
        std::mem::swap(&mut a, &mut b);
        if da0 % 2 == 1 && db0 % 2 == 1 {
            sign = -sign;
        }
    }
    loop {
        let da = degree(&a).unwrap();
        let db = degree(&b).unwrap();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let r = prem(&a, &b);
        a = b;
        let div = &g * num_traits::pow(h.clone(), delta);
        b = r.iter().map(|c| c / &div).collect();
        g = a[degree(&a).unwrap()].clone();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
        };
        match degree(&b) {
            None => return BigInt::zero(),
            Some(0) => {
                let da = degree(&a).unwrap();
                let lb = b[0].clone();
                let h_final = if da == 0 {
                    h
                } else {
                    num_traits::pow(lb, da) / num_traits::pow(h, da - 1)
                };
                return sign * t * h_final;
            }
            Some(_) => {}
        }
    }
}

type QPoly = Vec<BigRational>;

fn q_trim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn q_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    q_trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / &lb;
        for j in 0..=db {
            let sub = &c * &b[j];
            r[dr - db + j] -= sub;
        }
        r.pop();
        q_trim(&mut r);
    }
    r
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Number of distinct real roots, from a Sturm sequence in exact rationals.
pub fn real_root_count(coeffs: &[BigInt]) -> usize {
    let f: QPoly = coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let df: QPoly = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| BigRational::from_integer(c * BigInt::from(k)))
        .collect();
    let mut seq = vec![f, df];
    loop {
        let n = seq.len();
        let r = q_rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let sgn = |c: &BigRational| if c.is_positive() { 1 } else if c.is_negative() { -1 } else { 0 };
    let at_pos = sign_changes(seq.iter().map(|p| sgn(p.last().unwrap())));
    let at_neg = sign_changes(seq.iter().map(|p| {
        let s = sgn(p.last().unwrap());
        if (p.len() - 1) % 2 == 1 { -s } else { s }
    }));
    at_neg - at_pos
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn accepts_standard_cubic_and_quartic() {
        assert!(validate_polynomial(&[-1, -1, 0, 1], false).is_ok());
        assert!(validate_polynomial(&[-1, -1, 0, 0, 1], false).is_ok());
        assert!(validate_polynomial(&[-5, -2, 0, 1], false).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(validate_polynomial(&[], false), Err(OtError::EmptyPolynomial));
        assert_eq!(validate_polynomial(&[1, 0, 2], false), Err(OtError::NotMonic("2".into())));
        assert_eq!(validate_polynomial(&[-2, 0, 1], false), Err(OtError::DegreeTooSmall(2)));
        assert_eq!(
            validate_polynomial(&[0, -1, 0, 1], false),
            Err(OtError::Reducible(vec!["0".into(), "1".into()]))
        );
    }

    #[test]
    fn finds_quadratic_factors() {
        // (x^2 + x + 1)(x^2 - 2x + 3)
        let err = validate_polynomial(&[3, 1, 2, -1, 1], false).unwrap_err();
        assert!(matches!(err, OtError::Reducible(_)), "{err:?}");
        // (x^2 - 2)(x^3 - x - 1)
        let err = validate_polynomial(&[2, 2, -1, -3, 0, 1], false).unwrap_err();
        assert!(matches!(err, OtError::Reducible(_)), "{err:?}");
    }

    #[test]
    fn high_degree_needs_flag() {
        let mut c = vec![0i64; 10];
        c[0] = -1;
        c[1] = -1;
        c[9] = 1;
        assert_eq!(validate_polynomial(&c, false), Err(OtError::IrreducibilityUndecided(9)));
        assert!(validate_polynomial(&c, true).is_ok());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(real_root_count(&big(&[-1, -1, 0, 1])), 1);
        assert_eq!(real_root_count(&big(&[-1, -1, 0, 0, 1])), 2);
        assert_eq!(real_root_count(&big(&[0, -1, 0, 1])), 3);
        assert_eq!(real_root_count(&big(&[1, 0, 0, 0, 1])), 0);
    }

    #[test]
    fn resultant_small_cases() {
        let f = big(&[-1, -1, 0, 1]);
        assert_eq!(resultant(&f, &big(&[0, 1])), BigInt::from(1));
        assert_eq!(resultant(&f, &big(&[2])), BigInt::from(8));
        assert_eq!(resultant(&f, &big(&[1, 1])), BigInt::from(1));
        // Res(x^2 - 2, x - 3) = 3^2 - 2
        assert_eq!(resultant(&big(&[-2, 0, 1]), &big(&[-3, 1])), BigInt::from(7));
        // common root
        assert_eq!(resultant(&big(&[-1, 0, 1]), &big(&[-1, 1])), BigInt::zero());
    }
}
