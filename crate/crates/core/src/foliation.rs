//! Zero foliation of `omega` and the certificates that no nontrivial group
//! element maps a leaf `{(z_1, .., z_s)} x C^t` to itself.
//!
//! A leaf meets its image under `(u, a)` only if `s_i(u) z_i + s_i(a) = z_i` for
//! all `i <= s`. For `u != 1` the solution `z_i = s_i(a) / (1 - s_i(u))` is real,
//! so it is not in `H`; for `u = 1, a != 0` there is no solution at all.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{OtError, Result};
use crate::field::NumberField;
use crate::fixed::Fixed;
use crate::forms::{pairwise_sum, semipositivity_check};
use crate::group::{enumerate_words, word_label, GroupElement, Point, Tangent};
use crate::units::{Unit, MAX_PRECISION_RETRIES};

pub const ZERO_DIRECTION_TOL: f64 = 1e-12;
pub const KERNEL_RELATIVE_TOL: f64 = 1e-6;
pub const BOUNDARY_SAMPLES: usize = 256;

/// `omega(v, Iv)` vanishes, i.e. `v` is tangent to the zero foliation.
pub fn zero_direction_test(p: &Point, v: &Tangent) -> bool {
    semipositivity_check(p, v) < ZERO_DIRECTION_TOL
}

/// Componentwise description of the kernel: the `H^s` part of `v` is negligible.
pub fn in_flat_directions(v: &Tangent, s: usize) -> bool {
    let largest = v.v[..s].iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    largest <= KERNEL_RELATIVE_TOL * v.norm()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CertificateKind {
    RealFixedPoint {
        #[serde(serialize_with = "crate::report::ser_f64_vec")]
        values: Vec<f64>,
    },
    NoSolution {
        slot: usize,
    },
    IdentityRejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessCertificate {
    pub gamma: GroupElement,
    pub kind: CertificateKind,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub max_imag: f64,
    /// `max_i |s_i(u) z_i + s_i(a) - z_i|` for real fixed points, else 0.
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub substitution_residual: f64,
    pub precision_bits: u32,
}

impl DisjointnessCertificate {
    pub fn identity_rejected(gamma: GroupElement) -> Self {
        DisjointnessCertificate {
            gamma,
            kind: CertificateKind::IdentityRejected,
            max_imag: 0.0,
            substitution_residual: 0.0,
            precision_bits: 0,
        }
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self.kind, CertificateKind::IdentityRejected)
    }
}

/// Solves the fixed-point system on the `H^s` slots in real arithmetic.
pub fn fixed_point(field: &NumberField, g: &GroupElement, tau_sign: f64) -> Result<DisjointnessCertificate> {
    if g.is_identity() {
        return Err(OtError::IdentityElement);
    }
    let s = field.s();
    let unit_is_one = g.u.is_one();
    let mut escalated = None::<NumberField>;
    for attempt in 0..=MAX_PRECISION_RETRIES {
        let k = escalated.as_ref().unwrap_or(field);
        let bits = k.embeddings().precision_bits;
        let tau = Fixed::from_f64(tau_sign, bits);
        let one = Fixed::from_f64(1.0, bits);
        let su: Vec<Fixed> = k.embed_fixed(&g.u.element)[..s].iter().map(|z| z.re.clone()).collect();
        let sa: Vec<Fixed> = k.embed_fixed(&g.a)[..s].iter().map(|z| z.re.clone()).collect();

        let outcome = if unit_is_one {
            sa.iter()
                .position(|x| x.abs().mantissa() > tau.mantissa())
                .map(|slot| (CertificateKind::NoSolution { slot }, 0.0))
                .ok_or(s)
        } else {
            match su.iter().position(|x| (x - &one).abs().mantissa() <= tau.mantissa()) {
                Some(slot) => Err(slot),
                None => {
                    let values: Vec<f64> =
                        su.iter().zip(&sa).map(|(u, a)| a.div(&(&one - u)).to_f64()).collect();
                    let residual = values
                        .iter()
                        .zip(su.iter().zip(&sa))
                        .map(|(z, (u, a))| (u.to_f64() * z + a.to_f64() - z).abs())
                        .fold(0.0, f64::max);
                    Ok((CertificateKind::RealFixedPoint { values }, residual))
                }
            }
        };
        match outcome {
            Ok((kind, substitution_residual)) => {
                return Ok(DisjointnessCertificate {
                    gamma: g.clone(),
                    kind,
                    max_imag: 0.0,
                    substitution_residual,
                    precision_bits: bits,
                })
            }
            Err(slot) if attempt == MAX_PRECISION_RETRIES => {
                return Err(OtError::EmbeddingDegenerate { slot, bits });
            }
            Err(_) => escalated = Some(k.with_precision(bits * 2)?),
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, Serialize)]
pub struct WordCertificate {
    pub word: String,
    pub certificate: DisjointnessCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafSuiteReport {
    pub max_word_length: usize,
    pub words: usize,
    pub real_fixed_point: usize,
    pub no_solution: usize,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub max_substitution_residual: f64,
    pub certificates: Vec<WordCertificate>,
}

impl LeafSuiteReport {
    pub fn all_certified(&self) -> bool {
        self.real_fixed_point + self.no_solution == self.words
    }
}

/// Certificates for every nonidentity reduced word of length `<= max_len` in
/// the unit generators and the translation basis.
pub fn leaf_disjointness_suite(
    field: &NumberField,
    gens: &[Unit],
    max_len: usize,
    tau_sign: f64,
) -> Result<LeafSuiteReport> {
    let words = enumerate_words(field, gens, max_len)?;
    let certificates: Vec<WordCertificate> = words
        .par_iter()
        .map(|(w, g)| {
            Ok(WordCertificate { word: word_label(w), certificate: fixed_point(field, g, tau_sign)? })
        })
        .collect::<Result<_>>()?;
    let real_fixed_point = certificates
        .iter()
        .filter(|c| matches!(c.certificate.kind, CertificateKind::RealFixedPoint { .. }))
        .count();
    let no_solution = certificates
        .iter()
        .filter(|c| matches!(c.certificate.kind, CertificateKind::NoSolution { .. }))
        .count();
    let max_substitution_residual =
        certificates.iter().map(|c| c.certificate.substitution_residual).fold(0.0, f64::max);
    Ok(LeafSuiteReport {
        max_word_length: max_len,
        words: certificates.len(),
        real_fixed_point,
        no_solution,
        max_substitution_residual,
        certificates,
    })
}

/// Polynomial map of the unit disk, `zeta -> p0_j + sum_k c_{j,k} zeta^k`;
/// `coeffs[j][k - 1]` holds `c_{j,k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskMap {
    #[serde(serialize_with = "crate::report::ser_complex_matrix")]
    pub coeffs: Vec<Vec<Complex64>>,
}

impl DiskMap {
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Self {
        DiskMap { coeffs }
    }

    fn value(&self, p0: &Point, slot: usize, zeta: Complex64) -> Complex64 {
        let c = &self.coeffs[slot];
        let tail = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ck| (acc + ck) * zeta);
        p0.z[slot] + tail
    }

    fn derivative(&self, slot: usize, zeta: Complex64) -> Complex64 {
        let c = &self.coeffs[slot];
        c.iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, ck)| acc * zeta + ck * (k + 1) as f64)
    }

    /// The first `s` slots are constant, so the image lies in a leaf.
    pub fn is_leafwise(&self, s: usize) -> bool {
        self.coeffs[..s].iter().all(|c| c.iter().all(|z| *z == Complex64::new(0.0, 0.0)))
    }
}

/// `int_D f^* omega` over the unit disk by a polar midpoint rule on `n x n`
/// cells. The pullback density is `sum_{i<=s} |f_i'|^2 / (2 im(f_i)^2)`.
pub fn holomorphic_curve_integral(curve: &DiskMap, p0: &Point, n: usize) -> Result<f64> {
    let s = p0.s();
    if curve.coeffs.len() != p0.m() || n == 0 {
        return Err(OtError::Config(format!("disk map has {} slots, point has {}", curve.coeffs.len(), p0.m())));
    }
    let in_domain = |zeta: Complex64| -> Result<()> {
        for i in 0..s {
            if !(curve.value(p0, i, zeta).im > 0.0) {
                return Err(OtError::CurveLeavesDomain(i));
            }
        }
        Ok(())
    };
    for l in 0..BOUNDARY_SAMPLES {
        in_domain(Complex64::from_polar(1.0, std::f64::consts::TAU * l as f64 / BOUNDARY_SAMPLES as f64))?;
    }
    let d_rho = 1.0 / n as f64;
    let d_theta = std::f64::consts::TAU / n as f64;
    let mut cells = Vec::with_capacity(n * n);
    for k in 0..n {
        let rho = (k as f64 + 0.5) * d_rho;
        for l in 0..n {
            let zeta = Complex64::from_polar(rho, (l as f64 + 0.5) * d_theta);
            in_domain(zeta)?;
            let density: f64 = (0..s)
                .map(|i| {
                    let y = curve.value(p0, i, zeta).im;
                    curve.derivative(i, zeta).norm_sqr() / (2.0 * y * y)
                })
                .sum();
            cells.push(density * rho * d_rho * d_theta);
        }
    }
    Ok(pairwise_sum(&cells))
}

/// Random polynomial disk of degree `<= degree` around a random point. Slots
/// in `H` get coefficients with `sum |c_k| <= 0.9 im(p0_i)`; when `leafwise`
/// those slots are constant.
pub fn random_disk_map<R: Rng>(rng: &mut R, s: usize, t: usize, degree: usize, leafwise: bool) -> (DiskMap, Point) {
    let z: Vec<Complex64> = (0..s + t)
        .map(|i| {
            let im = if i < s { rng.random_range(0.5..=5.0) } else { rng.random_range(-2.0..=2.0) };
            Complex64::new(rng.random_range(-2.0..=2.0), im)
        })
        .collect();
    let coeffs = (0..s + t)
        .map(|i| {
            if i < s && leafwise {
                return vec![Complex64::new(0.0, 0.0); degree];
            }
            let raw: Vec<Complex64> = (0..degree)
                .map(|_| Complex64::from_polar(rng.random_range(0.05..=1.0), rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            if i < s {
                let total: f64 = raw.iter().map(|c| c.norm()).sum();
                let budget = 0.9 * z[i].im * rng.random_range(0.2..=1.0);
                raw.iter().map(|c| c * (budget / total)).collect()
            } else {
                raw
            }
        })
        .collect();
    let p0 = Point::new(z, s).expect("sampled in H");
    (DiskMap::new(coeffs), p0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AlgebraicInt, FieldOptions};
    use crate::forms::stokes_residual;
    use crate::units::DEFAULT_TAU_SIGN;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cubic() -> NumberField {
        NumberField::new(&[-1, -1, 0, 1], FieldOptions::default()).unwrap()
    }

    fn pt(z: &[(f64, f64)], s: usize) -> Point {
        Point::new(z.iter().map(|&(a, b)| Complex64::new(a, b)).collect(), s).unwrap()
    }

    #[test]
    fn zero_direction_examples() {
        let p = pt(&[(0.0, 2.0), (1.0, 1.0)], 1);
        let flat = Tangent::new(vec![Complex64::new(0.0, 0.0), Complex64::new(3.0, -1.0)]);
        assert!(zero_direction_test(&p, &flat) && in_flat_directions(&flat, 1));
        assert!(!zero_direction_test(&p, &Tangent::dx(2, 0)));
        assert!(zero_direction_test(&p, &Tangent::zero(2)));
    }

    #[test]
    fn fixed_point_examples() {
        let k = cubic();
        let alpha = Unit::new(&k, AlgebraicInt::from_i64s(&[0, 1, 0])).unwrap();
        let g = GroupElement::new(&k, alpha.clone(), k.one(), DEFAULT_TAU_SIGN).unwrap();
        let cert = fixed_point(&k, &g, DEFAULT_TAU_SIGN).unwrap();
        let CertificateKind::RealFixedPoint { values } = &cert.kind else { panic!("{cert:?}") };
        // 1 / (1 - 1.32471795724474602596)
        assert!((values[0] + 3.079_595_623_491_439).abs() < 1e-12);
        assert!(cert.substitution_residual < 1e-9);
        assert_eq!(cert.max_imag, 0.0);

        let t = GroupElement::translation(&k, AlgebraicInt::from_i64s(&[0, 2, -1]));
        assert_eq!(fixed_point(&k, &t, DEFAULT_TAU_SIGN).unwrap().kind, CertificateKind::NoSolution { slot: 0 });

        let u = GroupElement::scaling(&k, alpha);
        assert_eq!(
            fixed_point(&k, &u, DEFAULT_TAU_SIGN).unwrap().kind,
            CertificateKind::RealFixedPoint { values: vec![0.0] }
        );
        assert_eq!(
            fixed_point(&k, &GroupElement::identity(&k), DEFAULT_TAU_SIGN).unwrap_err(),
            OtError::IdentityElement
        );
    }

    #[test]
    fn leaf_suite_length_one() {
        let k = cubic();
        let alpha = Unit::new(&k, AlgebraicInt::from_i64s(&[0, 1, 0])).unwrap();
        let rep = leaf_disjointness_suite(&k, &[alpha], 1, DEFAULT_TAU_SIGN).unwrap();
        assert_eq!(rep.words, 8);
        assert_eq!(rep.real_fixed_point, 2);
        assert_eq!(rep.no_solution, 6);
        assert!(rep.all_certified());
    }

    #[test]
    fn constant_slots_integrate_to_zero() {
        let p = pt(&[(0.0, 2.0), (0.0, 0.0)], 1);
        let curve = DiskMap::new(vec![vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(1.0, 1.0)]]);
        assert_eq!(holomorphic_curve_integral(&curve, &p, 64).unwrap(), 0.0);
    }

    #[test]
    fn identity_disk_matches_stokes_surface() {
        let p = pt(&[(0.0, 2.0), (0.0, 0.0)], 1);
        let curve = DiskMap::new(vec![vec![Complex64::new(0.3, 0.0)], vec![Complex64::new(0.0, 0.0)]]);
        let curve_val = holomorphic_curve_integral(&curve, &p, 512).unwrap();
        let stokes = stokes_residual(&p, 0.3, 0, 512, 512).unwrap();
        assert!((curve_val - stokes.surface_integral).abs() < 1e-8);
    }

    #[test]
    fn squared_disk_is_positive() {
        let p = pt(&[(0.0, 2.0), (0.0, 0.0)], 1);
        let curve = DiskMap::new(vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ]);
        assert!(holomorphic_curve_integral(&curve, &p, 128).unwrap() > 0.0);
    }

    #[test]
    fn curve_leaving_h_is_rejected() {
        let p = pt(&[(0.0, 0.5), (0.0, 0.0)], 1);
        let curve = DiskMap::new(vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(0.0, 0.0)]]);
        assert_eq!(holomorphic_curve_integral(&curve, &p, 16).unwrap_err(), OtError::CurveLeavesDomain(0));
    }

    #[test]
    fn random_disks_stay_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..20 {
            let (curve, p0) = random_disk_map(&mut rng, 2, 1, 3, i % 2 == 0);
            let val = holomorphic_curve_integral(&curve, &p0, 32).unwrap();
            assert!(val >= 0.0);
            assert_eq!(val == 0.0, curve.is_leafwise(2));
        }
    }
}
