use num_bigint::BigInt;
use otcurves_core::field::{AlgebraicInt, FieldOptions, NumberField};
use otcurves_core::group::{compose, inverse, word_element, Letter};
use otcurves_core::units::{log_embedding, Unit};
use proptest::prelude::*;

const CUBIC: [i64; 4] = [-1, -1, 0, 1];
const QUARTIC: [i64; 5] = [-1, -1, 0, 0, 1];

fn field(c: &[i64]) -> NumberField {
    NumberField::new(c, FieldOptions::default()).unwrap()
}

/// `x * p mod f` for monic `f`, coefficients ascending.
fn times_x_mod(p: &[i128], f: &[i64]) -> Vec<i128> {
    let n = p.len();
    let top = p[n - 1];
    let mut out = vec![0i128; n];
    for k in (1..n).rev() {
        out[k] = p[k - 1];
    }
    for k in 0..n {
        out[k] -= top * f[k] as i128;
    }
    out
}

/// Norm as the determinant of multiplication by `a` on the power basis, by
/// fraction-free Bareiss elimination.
fn norm_by_bareiss(a: &[i64], f: &[i64]) -> i128 {
    let n = a.len();
    let mut col: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut m = vec![vec![0i128; n]; n];
    for j in 0..n {
        for (row, &c) in m.iter_mut().zip(&col) {
            row[j] = c;
        }
        col = times_x_mod(&col, f);
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else { return 0 };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, n)
}

fn letters() -> impl Strategy<Value = Vec<Letter>> {
    let letter = prop_oneof![
        any::<bool>().prop_map(|inverse| Letter::Unit { index: 0, inverse }),
        (0usize..3, any::<bool>()).prop_map(|(basis, negative)| Letter::Translate { basis, negative }),
    ];
    prop::collection::vec(letter, 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn embedding_is_multiplicative(a in coeffs(3), b in coeffs(3)) {
        let k = field(&CUBIC);
        let (a, b) = (AlgebraicInt::from_i64s(&a), AlgebraicInt::from_i64s(&b));
        let (ea, eb, eab) = (k.embed(&a), k.embed(&b), k.embed(&k.mul(&a, &b)));
        for i in 0..3 {
            let want = ea[i] * eb[i];
            prop_assert!((eab[i] - want).norm() <= 1e-9 * want.norm().max(1.0));
        }
    }

    #[test]
    fn exact_norm_matches_determinant(a in coeffs(4)) {
        let k = field(&QUARTIC);
        let exact = k.norm_exact(&AlgebraicInt::from_i64s(&a)).unwrap();
        prop_assert_eq!(exact, BigInt::from(norm_by_bareiss(&a, &QUARTIC)));
    }

    #[test]
    fn cubic_norm_matches_determinant(a in coeffs(3)) {
        let k = field(&CUBIC);
        let exact = k.norm_exact(&AlgebraicInt::from_i64s(&a)).unwrap();
        prop_assert_eq!(exact, BigInt::from(norm_by_bareiss(&a, &CUBIC)));
    }

    #[test]
    fn group_law_is_exact(w1 in letters(), w2 in letters(), w3 in letters()) {
        let k = field(&CUBIC);
        let gens = vec![Unit::new(&k, AlgebraicInt::from_i64s(&[0, 1, 0])).unwrap()];
        let g1 = word_element(&k, &gens, &w1).unwrap();
        let g2 = word_element(&k, &gens, &w2).unwrap();
        let g3 = word_element(&k, &gens, &w3).unwrap();
        prop_assert!(compose(&k, &g1, &inverse(&k, &g1).unwrap()).is_identity());
        prop_assert_eq!(
            compose(&k, &compose(&k, &g1, &g2), &g3),
            compose(&k, &g1, &compose(&k, &g2, &g3))
        );
        let mut w12 = w1.clone();
        w12.extend(&w2);
        // words act left to right, so w1 w2 is g2 after g1
        prop_assert_eq!(word_element(&k, &gens, &w12).unwrap(), compose(&k, &g2, &g1));
    }

    #[test]
    fn log_embedding_is_additive(i in -4i64..=4, j in -4i64..=4) {
        let k = field(&CUBIC);
        let alpha = AlgebraicInt::from_i64s(&[0, 1, 0]);
        let unit = |e: i64| Unit::new(&k, k.pow(&alpha, e).unwrap()).unwrap();
        let (li, lj, lij) = (log_embedding(&k, &unit(i)), log_embedding(&k, &unit(j)), log_embedding(&k, &unit(i + j)));
        for c in 0..2 {
            prop_assert!((lij.components[c] - li.components[c] - lj.components[c]).abs() < 1e-10);
        }
        prop_assert!(lij.sum.abs() < 2e-12);
    }
}

#[test]
fn bareiss_oracle_sanity() {
    assert_eq!(norm_by_bareiss(&[0, 1, 0], &CUBIC), 1);
    assert_eq!(norm_by_bareiss(&[2, 0, 0], &CUBIC), 8);
    assert_eq!(norm_by_bareiss(&[0, 0, 0], &CUBIC), 0);
}
