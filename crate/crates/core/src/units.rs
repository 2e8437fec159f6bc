//! Units of `Z[a]`, total positivity, the weighted log embedding
//! `l(u) = (ln|s_1(u)|, .., ln|s_s(u)|, 2 ln|s_{s+1}(u)|, .., 2 ln|s_m(u)|)`
//! and admissibility certificates for rank-`s` subgroups.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{OtError, Result};
use crate::field::{AlgebraicInt, NumberField};
use crate::fixed::Fixed;

pub const DEFAULT_TAU_DET: f64 = 1e-8;
pub const DEFAULT_TAU_SIGN: f64 = 1e-20;
/// Attempts at doubled precision before a sign is declared undecidable.
pub const MAX_PRECISION_RETRIES: usize = 3;
/// Log vectors shorter than this are torsion.
pub const TORSION_LOG_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unit {
    pub element: AlgebraicInt,
    pub norm_sign: i8,
}

impl Unit {
    pub fn new(field: &NumberField, element: AlgebraicInt) -> Result<Unit> {
        if element.dim() != field.degree() {
            return Err(OtError::DimensionMismatch(field.degree()));
        }
        let norm = field.norm_resultant(&element);
        if norm.abs() != BigInt::one() {
            return Err(OtError::NotAUnit);
        }
        Ok(Unit { element, norm_sign: if norm.is_positive() { 1 } else { -1 } })
    }

    pub fn one(field: &NumberField) -> Unit {
        Unit { element: field.one(), norm_sign: 1 }
    }

    pub fn mul(&self, other: &Unit, field: &NumberField) -> Unit {
        Unit { element: field.mul(&self.element, &other.element), norm_sign: self.norm_sign * other.norm_sign }
    }

    pub fn inverse(&self, field: &NumberField) -> Result<Unit> {
        Ok(Unit { element: field.inverse(&self.element)?, norm_sign: self.norm_sign })
    }

    pub fn is_one(&self) -> bool {
        self.element.is_one()
    }
}

pub fn is_unit(field: &NumberField, a: &AlgebraicInt) -> bool {
    field.norm_resultant(a).abs().is_one()
}

/// Signs of the real embeddings, escalating precision while any value is
/// within `tau_sign` of zero.
pub fn real_embedding_signs(field: &NumberField, a: &AlgebraicInt, tau_sign: f64) -> Result<Vec<bool>> {
    let mut current = None::<NumberField>;
    for attempt in 0..=MAX_PRECISION_RETRIES {
        let k = current.as_ref().unwrap_or(field);
        let bits = k.embeddings().precision_bits;
        let tau = Fixed::from_f64(tau_sign, bits);
        let values = k.embed_fixed(a);
        let real = &values[..k.s()];
        if real.iter().all(|v| v.re.abs().mantissa() > tau.mantissa()) {
            return Ok(real.iter().map(|v| !v.re.is_negative()).collect());
        }
        if attempt == MAX_PRECISION_RETRIES {
            return Err(OtError::SignUndecidable(bits));
        }
        current = Some(k.with_precision(bits * 2)?);
    }
    unreachable!()
}

pub fn is_totally_positive(field: &NumberField, u: &Unit, tau_sign: f64) -> Result<bool> {
    Ok(real_embedding_signs(field, &u.element, tau_sign)?.into_iter().all(|p| p))
}

#[derive(Debug, Clone, Serialize)]
pub struct FoundUnit {
    pub unit: Unit,
    /// `unit` itself when totally positive, otherwise its square.
    pub positive: Unit,
    pub power: u32,
}

fn order_key(a: &AlgebraicInt) -> (BigInt, BigInt, Vec<BigInt>) {
    (a.height(), a.l1(), a.coeffs().iter().rev().cloned().collect())
}

/// Every unit other than `+-1` with coefficients in `[-bound, bound]`, ordered
/// by height, then l1 norm, then coefficients from the top degree down.
pub fn search_units(field: &NumberField, bound: u32, tau_sign: f64) -> Result<Vec<FoundUnit>> {
    if bound == 0 {
        return Err(OtError::Config("unit bound must be at least 1".into()));
    }
    let n = field.degree();
    let b = bound as i64;
    let side = (2 * b + 1) as u64;
    let total = side.pow(n as u32);
    let emb = field.embeddings();
    let candidates: Vec<AlgebraicInt> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rest = idx;
            let coeffs: Vec<i64> = (0..n)
                .map(|_| {
                    let c = (rest % side) as i64 - b;
                    rest /= side;
                    c
                })
                .collect();
            if coeffs[1..].iter().all(|&c| c == 0) && coeffs[0].abs() <= 1 {
                return None;
            }
            let approx: f64 = emb.embed_f64(&coeffs).iter().fold(num_complex::Complex64::one(), |p, z| p * z).re;
            if (approx.abs() - 1.0).abs() > 0.25 {
                return None;
            }
            let a = AlgebraicInt::from_i64s(&coeffs);
            is_unit(field, &a).then_some(a)
        })
        .collect();
    if candidates.is_empty() {
        return Err(OtError::NoUnitFound(bound));
    }
    let mut found = Vec::with_capacity(candidates.len());
    for a in candidates {
        let unit = Unit::new(field, a)?;
        let (positive, power) = if is_totally_positive(field, &unit, tau_sign)? {
            (unit.clone(), 1)
        } else {
            (unit.mul(&unit, field), 2)
        };
        found.push(FoundUnit { unit, positive, power });
    }
    found.sort_by_cached_key(|f| order_key(&f.unit.element));
    found.dedup_by(|a, b| a.unit == b.unit);
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogVector {
    #[serde(serialize_with = "crate::report::ser_f64_vec")]
    pub components: Vec<f64>,
    /// `sum components`, zero for units up to rounding.
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub sum: f64,
}

impl LogVector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn log_embedding(field: &NumberField, u: &Unit) -> LogVector {
    log_embedding_of(field, &u.element)
}

pub(crate) fn log_embedding_of(field: &NumberField, a: &AlgebraicInt) -> LogVector {
    let s = field.s();
    let values = field.embed_fixed(a);
    let components: Vec<f64> = values[..field.m()]
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i < s {
                abs_ln(v.re.to_f64())
            } else {
                // ln|z|^2 without squaring in f64
                let (re, im) = (v.re.to_f64(), v.im.to_f64());
                2.0 * abs_ln(re.hypot(im))
            }
        })
        .collect();
    let sum = components.iter().sum();
    LogVector { components, sum }
}

fn abs_ln(x: f64) -> f64 {
    x.abs().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Admissible,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleCertificate {
    pub generators: Vec<Unit>,
    pub log_vectors: Vec<LogVector>,
    #[serde(serialize_with = "crate::report::ser_f64_matrix")]
    pub projected_matrix: Vec<Vec<f64>>,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub det: f64,
    #[serde(serialize_with = "crate::report::ser_f64_vec")]
    pub singular_values: Vec<f64>,
    pub rank: usize,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub tau_det: f64,
    pub verdict: Verdict,
}

pub fn check_admissible(
    field: &NumberField,
    gens: &[Unit],
    tau_det: f64,
    tau_sign: f64,
) -> Result<AdmissibleCertificate> {
    let s = field.s();
    let m = field.m();
    if gens.len() != s {
        return Err(OtError::WrongGeneratorCount { expected: s, got: gens.len() });
    }
    for (i, g) in gens.iter().enumerate() {
        if !is_totally_positive(field, g, tau_sign)? {
            return Err(OtError::NotTotallyPositive(i));
        }
    }
    let log_vectors: Vec<LogVector> = gens.iter().map(|g| log_embedding(field, g)).collect();
    let projected_matrix: Vec<Vec<f64>> = log_vectors.iter().map(|l| l.components[..s].to_vec()).collect();
    let proj = DMatrix::from_fn(s, s, |i, j| projected_matrix[i][j]);
    let det = proj.determinant();
    let full = DMatrix::from_fn(s, m, |i, j| log_vectors[i].components[j]);
    let mut singular_values: Vec<f64> = full.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let rank = singular_values.iter().filter(|&&sv| sv > tau_det).count();
    let verdict = if det.abs() > tau_det && rank == s { Verdict::Admissible } else { Verdict::Degenerate };
    Ok(AdmissibleCertificate {
        generators: gens.to_vec(),
        log_vectors,
        projected_matrix,
        det,
        singular_values,
        rank,
        tau_det,
        verdict,
    })
}

/// `k`-dimensional volume spanned by the rows.
fn row_volume(rows: &[Vec<f64>]) -> f64 {
    // prod |R_ii| of the columns; the Gram determinant loses half the digits
    let k = rows.len();
    let d = rows[0].len();
    let m = DMatrix::from_fn(d, k, |i, j| rows[j][i]);
    m.qr().r().diagonal().iter().map(|x| x.abs()).product()
}

/// Greedy choice of `s` totally positive generators: each step adds the
/// candidate giving the smallest projected volume above `tau_det`, ties broken
/// by the search order. For `s = 1` this is the positive unit with the
/// smallest nonzero `|ln s_1(u)|`.
pub fn select_generators(field: &NumberField, found: &[FoundUnit], tau_det: f64) -> Result<Vec<Unit>> {
    let s = field.s();
    let mut pool: Vec<(Unit, Vec<f64>)> = Vec::new();
    for f in found {
        if pool.iter().any(|(u, _)| *u == f.positive) {
            continue;
        }
        let l = log_embedding(field, &f.positive);
        if l.norm() < TORSION_LOG_NORM {
            continue;
        }
        pool.push((f.positive.clone(), l.components[..s].to_vec()));
    }
    pool.sort_by_cached_key(|(u, _)| order_key(&u.element));

    let mut chosen: Vec<usize> = Vec::new();
    for k in 0..s {
        let mut volumes: Vec<(usize, f64)> = Vec::new();
        for (idx, (_, proj)) in pool.iter().enumerate() {
            if chosen.contains(&idx) {
                continue;
            }
            let mut rows: Vec<Vec<f64>> = chosen.iter().map(|&c| pool[c].1.clone()).collect();
            rows.push(proj.clone());
            let vol = row_volume(&rows);
            if vol > tau_det {
                volumes.push((idx, vol));
            }
        }
        let Some(min) = volumes.iter().map(|&(_, v)| v).min_by(f64::total_cmp) else {
            return Err(OtError::InsufficientRank { found: k, needed: s });
        };
        let pick = volumes
            .iter()
            .find(|&&(_, v)| v <= min * (1.0 + 1e-9))
            .map(|&(i, _)| i)
            .expect("minimum is attained");
        chosen.push(pick);
    }
    Ok(chosen.into_iter().map(|i| pool[i].0.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldOptions;

    fn cubic() -> NumberField {
        NumberField::new(&[-1, -1, 0, 1], FieldOptions::default()).unwrap()
    }

    fn el(c: &[i64]) -> AlgebraicInt {
        AlgebraicInt::from_i64s(c)
    }

    #[test]
    fn unit_examples() {
        let k = cubic();
        assert!(is_unit(&k, &el(&[0, 1, 0])));
        assert!(!is_unit(&k, &el(&[2, 0, 0])));
        assert!(is_unit(&k, &el(&[1, 1, 0])));
        assert_eq!(Unit::new(&k, el(&[2, 0, 0])), Err(OtError::NotAUnit));
    }

    #[test]
    fn positivity_examples() {
        let k = cubic();
        let a = Unit::new(&k, el(&[0, 1, 0])).unwrap();
        let neg = Unit::new(&k, el(&[0, -1, 0])).unwrap();
        assert!(is_totally_positive(&k, &a, DEFAULT_TAU_SIGN).unwrap());
        assert!(!is_totally_positive(&k, &neg, DEFAULT_TAU_SIGN).unwrap());
        assert!(is_totally_positive(&k, &neg.mul(&neg, &k), DEFAULT_TAU_SIGN).unwrap());
    }

    #[test]
    fn log_examples() {
        let k = cubic();
        let a = Unit::new(&k, el(&[0, 1, 0])).unwrap();
        let l = log_embedding(&k, &a);
        assert!((l.components[0] - 0.2812).abs() < 1e-4);
        assert!((l.components[1] + 0.2812).abs() < 1e-4);
        assert!(l.sum.abs() < 2e-12);
        let minus_one = Unit::new(&k, el(&[-1, 0, 0])).unwrap();
        assert!(log_embedding(&k, &minus_one).components.iter().all(|&x| x == 0.0));
        let sq = log_embedding(&k, &a.mul(&a, &k));
        for (x, y) in sq.components.iter().zip(&l.components) {
            assert!((x - 2.0 * y).abs() < 1e-12);
        }
    }

    #[test]
    fn admissible_cubic() {
        let k = cubic();
        let a = Unit::new(&k, el(&[0, 1, 0])).unwrap();
        let cert = check_admissible(&k, &[a], DEFAULT_TAU_DET, DEFAULT_TAU_SIGN).unwrap();
        assert_eq!(cert.verdict, Verdict::Admissible);
        assert!((cert.det - 0.2812).abs() < 1e-4);
    }

    #[test]
    fn admissible_errors() {
        let k = cubic();
        let neg = Unit::new(&k, el(&[0, -1, 0])).unwrap();
        assert!(matches!(
            check_admissible(&k, &[], DEFAULT_TAU_DET, DEFAULT_TAU_SIGN),
            Err(OtError::WrongGeneratorCount { expected: 1, got: 0 })
        ));
        assert_eq!(
            check_admissible(&k, &[neg], DEFAULT_TAU_DET, DEFAULT_TAU_SIGN).unwrap_err(),
            OtError::NotTotallyPositive(0)
        );
    }

    #[test]
    fn repeated_generator_is_degenerate() {
        let k = NumberField::new(&[-1, -1, 0, 0, 1], FieldOptions::default()).unwrap();
        let found = search_units(&k, 2, DEFAULT_TAU_SIGN).unwrap();
        let u = found[0].positive.clone();
        let cert = check_admissible(&k, &[u.clone(), u], DEFAULT_TAU_DET, DEFAULT_TAU_SIGN).unwrap();
        assert_eq!(cert.verdict, Verdict::Degenerate);
        assert!(cert.det.abs() < 1e-12);
    }

    #[test]
    fn cubic_selection_is_generator() {
        let k = cubic();
        let found = search_units(&k, 2, DEFAULT_TAU_SIGN).unwrap();
        let gens = select_generators(&k, &found, DEFAULT_TAU_DET).unwrap();
        assert_eq!(gens[0].element, el(&[0, 1, 0]));
    }

    #[test]
    fn zero_bound_rejected() {
        assert!(matches!(search_units(&cubic(), 0, DEFAULT_TAU_SIGN), Err(OtError::Config(_))));
    }
}
