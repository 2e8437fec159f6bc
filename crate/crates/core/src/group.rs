//! The group `U x| O_K` acting on `H^s x C^t` by
//! `(u, a) . z = (s_1(u) z_1 + s_1(a), .., s_m(u) z_m + s_m(a))`.
//!
//! The group law `(u1, a1)(u2, a2) = (u1 u2, u1 a2 + a1)` is the one making
//! `act(g1 g2, z) = act(g1, act(g2, z))`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{OtError, Result};
use crate::field::{AlgebraicInt, NumberField};
use crate::units::{is_totally_positive, Unit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupElement {
    pub u: Unit,
    pub a: AlgebraicInt,
}

impl GroupElement {
    pub fn new(field: &NumberField, u: Unit, a: AlgebraicInt, tau_sign: f64) -> Result<Self> {
        if a.dim() != field.degree() {
            return Err(OtError::DimensionMismatch(field.degree()));
        }
        if !is_totally_positive(field, &u, tau_sign)? {
            return Err(OtError::NotTotallyPositive(0));
        }
        Ok(GroupElement { u, a })
    }

    pub fn identity(field: &NumberField) -> Self {
        GroupElement { u: Unit::one(field), a: field.zero() }
    }

    pub fn translation(field: &NumberField, a: AlgebraicInt) -> Self {
        GroupElement { u: Unit::one(field), a }
    }

    /// `(u, 0)`; `u` must already be known totally positive.
    pub fn scaling(field: &NumberField, u: Unit) -> Self {
        GroupElement { u, a: field.zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.a.is_zero()
    }

    /// Embedded linear part and translation on the `m = s + t` slots.
    pub fn affine(&self, field: &NumberField) -> AffineMap {
        let m = field.m();
        let mut scale = field.embed(&self.u.element);
        let mut shift = field.embed(&self.a);
        scale.truncate(m);
        shift.truncate(m);
        AffineMap { s: field.s(), scale, shift }
    }
}

pub fn compose(field: &NumberField, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    let u = g1.u.mul(&g2.u, field);
    let a = &field.mul(&g1.u.element, &g2.a) + &g1.a;
    GroupElement { u, a }
}

pub fn inverse(field: &NumberField, g: &GroupElement) -> Result<GroupElement> {
    let u_inv = g.u.inverse(field)?;
    let a = -&field.mul(&u_inv.element, &g.a);
    Ok(GroupElement { u: u_inv, a })
}

pub fn act(field: &NumberField, g: &GroupElement, p: &Point) -> Result<Point> {
    g.affine(field).apply(p)
}

pub fn differential(field: &NumberField, g: &GroupElement, v: &Tangent) -> Tangent {
    g.affine(field).push_forward(v)
}

/// `z_i -> scale_i z_i + shift_i`, the action of one group element.
#[derive(Debug, Clone)]
pub struct AffineMap {
    s: usize,
    pub scale: Vec<Complex64>,
    pub shift: Vec<Complex64>,
}

impl AffineMap {
    pub fn apply(&self, p: &Point) -> Result<Point> {
        let z: Vec<Complex64> = p.z.iter().zip(self.scale.iter().zip(&self.shift)).map(|(z, (u, a))| u * z + a).collect();
        if let Some(i) = z[..self.s].iter().position(|w| !(w.im > 0.0)) {
            return Err(OtError::LeftHalfSpace(i));
        }
        Ok(Point { z, s: self.s })
    }

    pub fn push_forward(&self, v: &Tangent) -> Tangent {
        Tangent { v: v.v.iter().zip(&self.scale).map(|(v, u)| u * v).collect() }
    }
}

/// Point of `H^s x C^t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub z: Vec<Complex64>,
    #[serde(skip)]
    s: usize,
}

impl Point {
    pub fn new(z: Vec<Complex64>, s: usize) -> Result<Self> {
        if s > z.len() {
            return Err(OtError::InvalidPoint(format!("{} slots but s = {s}", z.len())));
        }
        if let Some(i) = z.iter().position(|w| !w.is_finite()) {
            return Err(OtError::InvalidPoint(format!("non-finite coordinate in slot {i}")));
        }
        if let Some(i) = z[..s].iter().position(|w| !(w.im > 0.0)) {
            return Err(OtError::InvalidPoint(format!("slot {i} not in the upper half plane")));
        }
        Ok(Point { z, s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub(crate) fn with_slot(&self, slot: usize, value: Complex64) -> Point {
        let mut z = self.z.clone();
        z[slot] = value;
        Point { z, s: self.s }
    }
}

/// Real tangent vector written in complex coordinates, `dz_i(v) = v_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tangent {
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub v: Vec<Complex64>,
}

impl Tangent {
    pub fn new(v: Vec<Complex64>) -> Self {
        Tangent { v }
    }

    pub fn zero(m: usize) -> Self {
        Tangent { v: vec![Complex64::new(0.0, 0.0); m] }
    }

    /// `d/dx` in slot `i`.
    pub fn dx(m: usize, i: usize) -> Self {
        let mut t = Tangent::zero(m);
        t.v[i] = Complex64::new(1.0, 0.0);
        t
    }

    /// `d/dy` in slot `i`.
    pub fn dy(m: usize, i: usize) -> Self {
        let mut t = Tangent::zero(m);
        t.v[i] = Complex64::new(0.0, 1.0);
        t
    }

    /// The complex structure: `(Iv)_i = sqrt(-1) v_i`.
    pub fn rotate(&self) -> Tangent {
        Tangent { v: self.v.iter().map(|z| Complex64::new(-z.im, z.re)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Tangent {
        Tangent { v: self.v.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Tangent) -> Tangent {
        Tangent { v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBox {
    pub im_min: f64,
    pub im_max: f64,
    pub re_min: f64,
    pub re_max: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { im_min: 0.1, im_max: 10.0, re_min: -10.0, re_max: 10.0 }
    }
}

pub fn sample_point_with<R: Rng>(rng: &mut R, bx: &SampleBox, s: usize, t: usize) -> Point {
    let z = (0..s + t)
        .map(|i| {
            let re = rng.random_range(bx.re_min..=bx.re_max);
            let im = if i < s { rng.random_range(bx.im_min..=bx.im_max) } else { rng.random_range(bx.re_min..=bx.re_max) };
            Complex64::new(re, im)
        })
        .collect();
    Point { z, s }
}

pub fn sample_point(seed: u64, bx: &SampleBox, s: usize, t: usize) -> Point {
    sample_point_with(&mut ChaCha8Rng::seed_from_u64(seed), bx, s, t)
}

/// Tangent vector with components uniform in `[-1, 1] + [-1, 1] i`.
pub fn sample_tangent<R: Rng>(rng: &mut R, m: usize) -> Tangent {
    Tangent { v: (0..m).map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))).collect() }
}

/// One letter of a word in the generators of `U` and the translation basis
/// `1, a, .., a^{n-1}` of `Z[a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Unit { index: usize, inverse: bool },
    Translate { basis: usize, negative: bool },
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::Unit { index, inverse } => Letter::Unit { index, inverse: !inverse },
            Letter::Translate { basis, negative } => Letter::Translate { basis, negative: !negative },
        }
    }

    pub fn label(self) -> String {
        match self {
            Letter::Unit { index, inverse: false } => format!("u{}", index + 1),
            Letter::Unit { index, inverse: true } => format!("u{}^-1", index + 1),
            Letter::Translate { basis, negative: false } => format!("a{basis}"),
            Letter::Translate { basis, negative: true } => format!("-a{basis}"),
        }
    }

    fn element(self, field: &NumberField, gens: &[Unit]) -> Result<GroupElement> {
        Ok(match self {
            Letter::Unit { index, inverse } => {
                let u = gens.get(index).ok_or_else(|| OtError::WordParse(format!("no generator u{}", index + 1)))?;
                let u = if inverse { u.inverse(field)? } else { u.clone() };
                GroupElement::scaling(field, u)
            }
            Letter::Translate { basis, negative } => {
                if basis >= field.degree() {
                    return Err(OtError::WordParse(format!("no basis element a{basis}")));
                }
                let b = AlgebraicInt::basis(basis, field.degree());
                GroupElement::translation(field, if negative { -&b } else { b })
            }
        })
    }
}

/// Parses a whitespace-separated word such as `"u a"` or `"u2^-1 -a1 u1"`.
///
/// `u` is `u1`, `a` is `a0` (translation by 1), `aK` translates by `a^K`.
pub fn parse_word(text: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',' || c == '*').filter(|t| !t.is_empty()) {
        let bad = || OtError::WordParse(tok.to_string());
        let (negative, body) = match tok.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, tok),
        };
        let (body, inverse) = match body.strip_suffix("^-1") {
            Some(rest) => (rest, true),
            None => (body, false),
        };
        if let Some(idx) = body.strip_prefix('u') {
            if negative {
                return Err(bad());
            }
            let index = if idx.is_empty() { 1 } else { idx.parse::<usize>().map_err(|_| bad())? };
            if index == 0 {
                return Err(bad());
            }
            out.push(Letter::Unit { index: index - 1, inverse });
        } else if let Some(idx) = body.strip_prefix('a') {
            let basis = if idx.is_empty() { 0 } else { idx.parse::<usize>().map_err(|_| bad())? };
            out.push(Letter::Translate { basis, negative: negative ^ inverse });
        } else {
            return Err(bad());
        }
    }
    if out.is_empty() {
        return Err(OtError::WordParse("empty word".into()));
    }
    Ok(out)
}

pub fn word_label(word: &[Letter]) -> String {
    word.iter().map(|l| l.label()).collect::<Vec<_>>().join(" ")
}

/// Group element of a word whose letters act left to right: `"u a"` first
/// scales by `u`, then translates by 1, giving `(u, 1)`.
pub fn word_element(field: &NumberField, gens: &[Unit], word: &[Letter]) -> Result<GroupElement> {
    let mut g = GroupElement::identity(field);
    for &l in word {
        g = compose(field, &l.element(field, gens)?, &g);
    }
    Ok(g)
}

pub fn alphabet(num_gens: usize, degree: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(2 * (num_gens + degree));
    for index in 0..num_gens {
        out.push(Letter::Unit { index, inverse: false });
        out.push(Letter::Unit { index, inverse: true });
    }
    for basis in 0..degree {
        out.push(Letter::Translate { basis, negative: false });
        out.push(Letter::Translate { basis, negative: true });
    }
    out
}

/// All reduced words of length `1..=max_len` (no letter next to its inverse),
/// evaluated and deduplicated by group element, identity dropped. Each element
/// keeps the first word reaching it in length-then-alphabet order.
pub fn enumerate_words(
    field: &NumberField,
    gens: &[Unit],
    max_len: usize,
) -> Result<Vec<(Vec<Letter>, GroupElement)>> {
    let letters = alphabet(gens.len(), field.degree());
    let letter_elems: Vec<GroupElement> =
        letters.iter().map(|l| l.element(field, gens)).collect::<Result<_>>()?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<Letter>, GroupElement)> = vec![(Vec::new(), GroupElement::identity(field))];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, g) in &frontier {
            for (l, le) in letters.iter().zip(&letter_elems) {
                if word.last().is_some_and(|last| *last == l.inverse()) {
                    continue;
                }
                let mut w = word.clone();
                w.push(*l);
                let h = compose(field, le, g);
                if !h.is_identity() && seen.insert((h.u.element.clone(), h.a.clone())) {
                    out.push((w.clone(), h.clone()));
                }
                next.push((w, h));
            }
        }
        frontier = next;
    }
    Ok(out)
}

pub fn random_word<R: Rng>(rng: &mut R, num_gens: usize, degree: usize, max_len: usize) -> Vec<Letter> {
    let letters = alphabet(num_gens, degree);
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| letters[rng.random_range(0..letters.len())]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldOptions;
    use crate::units::DEFAULT_TAU_SIGN;

    fn cubic() -> NumberField {
        NumberField::new(&[-1, -1, 0, 1], FieldOptions::default()).unwrap()
    }

    fn el(c: &[i64]) -> AlgebraicInt {
        AlgebraicInt::from_i64s(c)
    }

    fn alpha(k: &NumberField) -> Unit {
        Unit::new(k, el(&[0, 1, 0])).unwrap()
    }

    fn pt(z: &[(f64, f64)], s: usize) -> Point {
        Point::new(z.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), s).unwrap()
    }

    #[test]
    fn compose_examples() {
        let k = cubic();
        let a = el(&[1, 2, 3]);
        let b = el(&[-4, 0, 1]);
        let ta = GroupElement::translation(&k, a.clone());
        let tb = GroupElement::translation(&k, b.clone());
        assert_eq!(compose(&k, &ta, &tb), GroupElement::translation(&k, &a + &b));
        let u = GroupElement::scaling(&k, alpha(&k));
        assert_eq!(compose(&k, &u, &tb).a, k.mul(&alpha(&k).element, &b));
        let g1 = GroupElement::new(&k, alpha(&k), el(&[1, 0, 0]), DEFAULT_TAU_SIGN).unwrap();
        let g2 = GroupElement::new(&k, alpha(&k), el(&[0, 1, 0]), DEFAULT_TAU_SIGN).unwrap();
        let g = compose(&k, &g1, &g2);
        assert_eq!(g.u.element, el(&[0, 0, 1]));
        assert_eq!(g.a, el(&[1, 0, 1]));
    }

    #[test]
    fn inverse_examples() {
        let k = cubic();
        let a = el(&[2, -1, 5]);
        assert_eq!(inverse(&k, &GroupElement::translation(&k, a.clone())).unwrap().a, -&a);
        let u = GroupElement::scaling(&k, alpha(&k));
        assert_eq!(inverse(&k, &u).unwrap().u.element, el(&[-1, 0, 1]));
        let g = GroupElement::new(&k, alpha(&k), k.one(), DEFAULT_TAU_SIGN).unwrap();
        let gi = inverse(&k, &g).unwrap();
        assert_eq!(gi.u.element, el(&[-1, 0, 1]));
        assert_eq!(gi.a, el(&[1, 0, -1]));
        assert!(compose(&k, &g, &gi).is_identity());
    }

    #[test]
    fn act_examples() {
        let k = cubic();
        let p = pt(&[(0.3, 1.7), (-2.0, 0.5)], 1);
        assert_eq!(act(&k, &GroupElement::identity(&k), &p).unwrap(), p);
        let q = act(&k, &GroupElement::translation(&k, k.one()), &pt(&[(0.0, 1.0), (0.0, 0.0)], 1)).unwrap();
        assert!((q.z[0] - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        let q = act(&k, &GroupElement::scaling(&k, alpha(&k)), &pt(&[(0.0, 1.0), (0.0, 0.0)], 1)).unwrap();
        assert!((q.z[0] - Complex64::new(0.0, 1.3247179572)).norm() < 1e-9);
        assert_eq!(q.z[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn negative_unit_is_rejected() {
        let k = cubic();
        let neg = Unit::new(&k, el(&[0, -1, 0])).unwrap();
        assert_eq!(GroupElement::new(&k, neg.clone(), k.zero(), DEFAULT_TAU_SIGN), Err(OtError::NotTotallyPositive(0)));
        // bypassing the check is caught by the action
        let bad = GroupElement { u: neg, a: k.zero() };
        assert_eq!(act(&k, &bad, &pt(&[(0.0, 1.0), (0.0, 0.0)], 1)), Err(OtError::LeftHalfSpace(0)));
    }

    #[test]
    fn differential_examples() {
        let k = cubic();
        let v = Tangent::new(vec![Complex64::new(0.2, -0.1), Complex64::new(1.0, 3.0)]);
        assert_eq!(differential(&k, &GroupElement::translation(&k, el(&[3, 1, 1])), &v), v);
        let d = differential(&k, &GroupElement::scaling(&k, alpha(&k)), &Tangent::dx(2, 0));
        assert!((d.v[0].re - 1.3247179572).abs() < 1e-9);
        assert_eq!(d.v[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let bx = SampleBox::default();
        assert_eq!(sample_point(0, &bx, 2, 1), sample_point(0, &bx, 2, 1));
        for seed in 0..1000 {
            let p = sample_point(seed, &bx, 2, 1);
            assert!(Point::new(p.z.clone(), 2).is_ok());
            assert!(p.z[..2].iter().all(|z| z.im >= 0.1));
        }
    }

    #[test]
    fn parse_words() {
        assert_eq!(
            parse_word("u a").unwrap(),
            vec![Letter::Unit { index: 0, inverse: false }, Letter::Translate { basis: 0, negative: false }]
        );
        assert_eq!(
            parse_word("u2^-1, -a1 a2^-1").unwrap(),
            vec![
                Letter::Unit { index: 1, inverse: true },
                Letter::Translate { basis: 1, negative: true },
                Letter::Translate { basis: 2, negative: true },
            ]
        );
        assert!(parse_word("").is_err());
        assert!(parse_word("v").is_err());
        assert!(parse_word("-u").is_err());
        assert!(parse_word("u0").is_err());
    }

    #[test]
    fn word_order_is_left_to_right() {
        let k = cubic();
        let g = word_element(&k, &[alpha(&k)], &parse_word("u a").unwrap()).unwrap();
        assert_eq!(g.u.element, el(&[0, 1, 0]));
        assert_eq!(g.a, k.one());
        assert!(word_element(&k, &[alpha(&k)], &parse_word("u2").unwrap()).is_err());
        assert!(word_element(&k, &[alpha(&k)], &parse_word("a3").unwrap()).is_err());
    }

    #[test]
    fn length_one_words() {
        let k = cubic();
        let words = enumerate_words(&k, &[alpha(&k)], 1).unwrap();
        assert_eq!(words.len(), 8);
        assert!(words.iter().all(|(_, g)| !g.is_identity()));
    }
}
