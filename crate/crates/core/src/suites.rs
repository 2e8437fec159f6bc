//! Seeded verification suites and the command entry points behind the CLI.
//!
//! Every trial draws from its own `ChaCha8Rng` seeded by `(seed, suite, trial)`,
//! so trials run in parallel and any single trial can be replayed alone.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::{OtError, Result};
use crate::field::{AlgebraicInt, NumberField};
use crate::fixed::FixedComplex;
use crate::foliation::{
    fixed_point, holomorphic_curve_integral, in_flat_directions, random_disk_map, zero_direction_test,
    CertificateKind, DisjointnessCertificate, WordCertificate,
};
use crate::forms::{
    dc_logphi, invariance_residual, omega_closed, omega_fd, semipositivity_check, stokes_residual,
};
use crate::group::{
    compose, enumerate_words, inverse, parse_word, random_word, sample_point_with, sample_tangent, word_element,
    word_label, GroupElement, Letter, Point, SampleBox,
};
use crate::report::{FieldSummary, Report, UnitsSummary};
use crate::units::{
    check_admissible, is_totally_positive, log_embedding, log_embedding_of, search_units, select_generators,
    FoundUnit, Unit, Verdict,
};

/// At most this many failure records are kept per suite.
pub const MAX_FAILURE_RECORDS: usize = 20;

const GROUP_TOL: f64 = 1e-9;
const FD_REL_TOL: f64 = 1e-6;
const INVARIANCE_TOL: f64 = 1e-9;
const SEMIPOSITIVE_FLOOR: f64 = -1e-12;
const ZERO_MODULUS: f64 = 1e-12;
const STOKES_TOL: f64 = 1e-4;
const SUBSTITUTION_TOL: f64 = 1e-9;
const CURVE_FLOOR: f64 = -1e-10;
const CURVE_ZERO: f64 = 1e-8;
const LOG_SUM_TOL: f64 = 1e-12;
const LOG_ADDITIVITY_TOL: f64 = 1e-10;
const HOMOMORPHISM_REL_TOL: f64 = 1e-9;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, so suite seeds do not depend on suite order.
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn trial_seed(seed: u64, suite: &str, trial: usize) -> u64 {
    mix64(mix64(seed ^ name_hash(suite)) ^ trial as u64)
}

pub fn trial_rng(seed: u64, suite: &str, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, suite, trial))
}

/// Outcome of one trial: the statistic it measured and whether it met the bound.
#[derive(Debug, Clone)]
pub struct Sample {
    pub value: f64,
    pub ok: bool,
    pub detail: String,
}

impl Sample {
    fn new(value: f64, ok: bool, detail: impl Into<String>) -> Self {
        Sample { value, ok, detail: detail.into() }
    }

    fn below(value: f64, tol: f64) -> Self {
        Sample::new(value, value < tol, format!("value {value:.6e}, bound {tol:e}"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub suite: String,
    pub trial: usize,
    pub seed: u64,
    pub trial_seed: u64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub module: &'static str,
    pub criterion: &'static str,
    pub trials: usize,
    pub passed: bool,
    pub failed: usize,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub max: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub min: f64,
    pub failures: Vec<FailureRecord>,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteSpec {
    pub name: &'static str,
    pub module: &'static str,
    pub criterion: &'static str,
    pub trials: usize,
}

/// Field, units and generators shared by all suites.
pub struct Context {
    pub config: Config,
    pub field: NumberField,
    pub found: Vec<FoundUnit>,
    pub gens: Vec<Unit>,
    pub words: Vec<(Vec<Letter>, GroupElement)>,
    pub sample_box: SampleBox,
}

pub fn build_field(config: &Config) -> Result<NumberField> {
    config.validate()?;
    NumberField::new(&config.polynomial, config.field_options())
}

impl Context {
    pub fn new(config: &Config) -> Result<Self> {
        let field = build_field(config)?;
        let tol = &config.tolerances;
        let found = search_units(&field, config.unit_bound, tol.tau_sign)?;
        let gens = select_generators(&field, &found, tol.tau_det)?;
        let words = enumerate_words(&field, &gens, config.trials.leaf_word_length)?;
        Ok(Context { config: config.clone(), field, found, gens, words, sample_box: SampleBox::default() })
    }

    fn unit_pairs(&self) -> usize {
        let k = self.found.len();
        k * (k + 1) / 2
    }

    fn permutations(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..self.gens.len() {
            out = out
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..self.gens.len())
                        .filter(|i| !p.contains(i))
                        .map(|i| {
                            let mut q = p.clone();
                            q.push(i);
                            q
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out
    }

    pub fn specs(&self) -> Vec<SuiteSpec> {
        let t = &self.config.trials;
        let spec = |name, module, criterion, trials| SuiteSpec { name, module, criterion, trials };
        vec![
            spec("root_reconstruction", "field_core", "max coefficient error < n 2^n eps_root", 1),
            spec("conjugate_pairing", "field_core", "complex roots stored as exact conjugate pairs", 1),
            spec("mul_homomorphism", "field_core", "embedding of products, relative error < 1e-9", t.mul_homomorphism),
            spec("norm_consistency", "field_core", "exact norm equals rounded embedding product", t.norm_consistency),
            spec("log_sum_zero", "unit_lattice", "|sum l(u)| <= m 1e-12 for every found unit", self.found.len()),
            spec("log_additivity", "unit_lattice", "l(uv) = l(u) + l(v) within 1e-10", self.unit_pairs()),
            spec("squaring_positivity", "unit_lattice", "u^2 is a totally positive unit", self.found.len()),
            spec("admissible", "unit_lattice", "selected generators certified admissible", 1),
            spec("admissible_permutation", "unit_lattice", "|det| and verdict invariant under permutation", self.permutations().len()),
            spec("action_homomorphism", "ot_group", "|g1g2 z - g1(g2 z)| < 1e-9", t.action_homomorphism),
            spec("inverse_exact", "ot_group", "g g^-1 = g^-1 g = (1, 0) exactly", t.inverse_exact),
            spec("h_preservation", "ot_group", "image stays in H^s", t.h_preservation),
            spec("associativity", "ot_group", "(g1g2)g3 = g1(g2g3) exactly", t.associativity),
            spec("omega_vs_fd", "forms", "closed form vs finite differences, relative < 1e-6", t.omega_vs_fd),
            spec("bilinearity", "forms", "bilinear and antisymmetric to rounding", t.bilinearity),
            spec("j_invariance", "forms", "omega(Iv, Iw) = omega(v, w) within 1e-12", t.j_invariance),
            spec("gamma_invariance", "forms", "invariance residuals of omega and d^c log phi < 1e-9", t.gamma_invariance),
            spec("semipositivity", "forms", "omega(v, Iv) >= -1e-12, zero iff H-part vanishes", t.semipositivity),
            spec("stokes", "forms", "|surface - boundary| < 1e-4 at r and r/2", 2),
            spec("kernel_characterization", "foliation", "the three kernel tests agree", t.kernel_characterization),
            spec("leaf_certificates", "foliation", "every word certified, substitution residual < 1e-9", self.words.len()),
            spec("translation_no_solution", "foliation", "(1, a) with a != 0 has no solution in any slot", t.translation_no_solution),
            spec("curve_integral", "foliation", "disk integrals >= -1e-10, zero within 1e-8 iff leafwise", t.curve_integral),
        ]
    }

    fn random_element<R: Rng>(&self, rng: &mut R) -> AlgebraicInt {
        loop {
            let c: Vec<i64> = (0..self.field.degree()).map(|_| rng.random_range(-9..=9)).collect();
            if c.iter().any(|&x| x != 0) {
                return AlgebraicInt::from_i64s(&c);
            }
        }
    }

    fn random_group_element<R: Rng>(&self, rng: &mut R) -> Result<GroupElement> {
        let len = self.config.trials.random_word_length;
        let w = random_word(rng, self.gens.len(), self.field.degree(), len);
        word_element(&self.field, &self.gens, &w)
    }

    fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        sample_point_with(rng, &self.sample_box, self.field.s(), self.field.t())
    }

    /// Tangent vector whose `H^s` part is zeroed half the time.
    fn random_split_tangent<R: Rng>(&self, rng: &mut R) -> (crate::group::Tangent, bool) {
        let mut v = sample_tangent(rng, self.field.m());
        let flat = rng.random_bool(0.5);
        if flat {
            for z in v.v.iter_mut().take(self.field.s()) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        (v, flat)
    }

    fn run_trial(&self, name: &str, trial: usize) -> Result<Sample> {
        let mut rng = trial_rng(self.config.seed, name, trial);
        let rng = &mut rng;
        let k = &self.field;
        let (s, m, n) = (k.s(), k.m(), k.degree());
        let tol = &self.config.tolerances;
        Ok(match name {
            "root_reconstruction" => {
                let e = k.embeddings();
                let bound = n as f64 * 2f64.powi(n as i32) * e.eps_root;
                Sample::below(e.reconstruction_error(), bound)
            }
            "conjugate_pairing" => {
                let roots = k.embeddings().fixed_roots();
                let t = k.t();
                let bad = (0..t).filter(|&i| roots[s + i] != roots[s + t + i].conj()).count();
                let real_ok = roots[..s].iter().all(|r| r.im.is_zero());
                Sample::new(bad as f64, bad == 0 && real_ok, format!("{bad} unpaired roots"))
            }
            "mul_homomorphism" => {
                let (a, b) = (self.random_element(rng), self.random_element(rng));
                let ab = k.embed(&k.mul(&a, &b));
                let (ea, eb) = (k.embed(&a), k.embed(&b));
                let err = (0..n)
                    .map(|i| {
                        let want = ea[i] * eb[i];
                        (ab[i] - want).norm() / want.norm().max(1.0)
                    })
                    .fold(0.0, f64::max);
                Sample::new(err, err < HOMOMORPHISM_REL_TOL, format!("a = {a}, b = {b}, error {err:.3e}"))
            }
            "norm_consistency" => {
                let a = self.random_element(rng);
                let exact = k.norm_exact(&a)?;
                let bits = k.embeddings().precision_bits;
                let product = k
                    .embed_fixed(&a)
                    .iter()
                    .fold(FixedComplex::from_int(&BigInt::one(), bits), |p, z| &p * z);
                let rounded = product.re.round();
                let diff = (&exact - &rounded).magnitude().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
                Sample::new(diff, exact == rounded, format!("a = {a}, exact {exact}, product {rounded}"))
            }
            "log_sum_zero" => {
                let u = &self.found[trial].unit;
                let sum = log_embedding(k, u).sum.abs();
                Sample::new(sum, sum <= m as f64 * LOG_SUM_TOL, format!("u = {}, |sum| {sum:.3e}", u.element))
            }
            "log_additivity" => {
                let (i, j) = triangular(trial);
                let (u, v) = (&self.found[i].unit, &self.found[j].unit);
                let (lu, lv) = (log_embedding(k, u), log_embedding(k, v));
                let luv = log_embedding_of(k, &k.mul(&u.element, &v.element));
                let err = (0..m)
                    .map(|c| (luv.components[c] - lu.components[c] - lv.components[c]).abs())
                    .fold(0.0, f64::max);
                Sample::new(err, err < LOG_ADDITIVITY_TOL, format!("pair ({i}, {j}), error {err:.3e}"))
            }
            "squaring_positivity" => {
                let u = &self.found[trial].unit;
                let sq = u.mul(u, k);
                let unit = k.norm_exact(&sq.element)?.is_one();
                let positive = is_totally_positive(k, &sq, tol.tau_sign)?;
                Sample::new(0.0, unit && positive, format!("u = {}, unit {unit}, totally positive {positive}", u.element))
            }
            "admissible" => {
                let cert = check_admissible(k, &self.gens, tol.tau_det, tol.tau_sign)?;
                Sample::new(cert.det.abs(), cert.verdict == Verdict::Admissible, format!("det {:.6e}", cert.det))
            }
            "admissible_permutation" => {
                let base = check_admissible(k, &self.gens, tol.tau_det, tol.tau_sign)?;
                let perm = &self.permutations()[trial];
                let gens: Vec<Unit> = perm.iter().map(|&i| self.gens[i].clone()).collect();
                let cert = check_admissible(k, &gens, tol.tau_det, tol.tau_sign)?;
                let diff = (cert.det.abs() - base.det.abs()).abs();
                let ok = diff <= 1e-12 * base.det.abs().max(1.0) && cert.verdict == base.verdict;
                Sample::new(diff, ok, format!("permutation {perm:?}, |det| difference {diff:.3e}"))
            }
            "action_homomorphism" => {
                let (g1, g2) = (self.random_group_element(rng)?, self.random_group_element(rng)?);
                let z = self.random_point(rng);
                let lhs = crate::group::act(k, &compose(k, &g1, &g2), &z)?;
                let rhs = crate::group::act(k, &g1, &crate::group::act(k, &g2, &z)?)?;
                let err = lhs.z.iter().zip(&rhs.z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                Sample::below(err, GROUP_TOL)
            }
            "inverse_exact" => {
                let g = self.random_group_element(rng)?;
                let gi = inverse(k, &g)?;
                let ok = compose(k, &g, &gi).is_identity() && compose(k, &gi, &g).is_identity();
                Sample::new(if ok { 0.0 } else { 1.0 }, ok, format!("u = {}, a = {}", g.u.element, g.a))
            }
            "h_preservation" => {
                let g = self.random_group_element(rng)?;
                let z = self.random_point(rng);
                match crate::group::act(k, &g, &z) {
                    Ok(q) => {
                        let min_im = q.z[..s].iter().map(|w| w.im).fold(f64::INFINITY, f64::min);
                        Sample::new(min_im, min_im > 0.0, format!("min imaginary part {min_im:.3e}"))
                    }
                    Err(e) => Sample::new(f64::NAN, false, e.to_string()),
                }
            }
            "associativity" => {
                let (g1, g2, g3) =
                    (self.random_group_element(rng)?, self.random_group_element(rng)?, self.random_group_element(rng)?);
                let left = compose(k, &compose(k, &g1, &g2), &g3);
                let right = compose(k, &g1, &compose(k, &g2, &g3));
                let ok = left == right;
                Sample::new(if ok { 0.0 } else { 1.0 }, ok, "triple composed two ways")
            }
            "omega_vs_fd" => {
                let p = self.random_point(rng);
                let (v, w) = (sample_tangent(rng, m), sample_tangent(rng, m));
                let closed = omega_closed(&p, &v, &w);
                let fd = omega_fd(&p, &v, &w, tol.fd_step)?.value;
                let rel = (closed - fd).abs() / (1.0 + closed.abs());
                Sample::new(rel, rel < FD_REL_TOL, format!("closed {closed:.12e}, finite difference {fd:.12e}"))
            }
            "bilinearity" => {
                let p = self.random_point(rng);
                let (v, v2, w) = (sample_tangent(rng, m), sample_tangent(rng, m), sample_tangent(rng, m));
                let (a, b): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let combo = v.scaled(a).add(&v2.scaled(b));
                let (o1, o2) = (omega_closed(&p, &v, &w), omega_closed(&p, &v2, &w));
                let scale = 1.0 + a.abs() * o1.abs() + b.abs() * o2.abs();
                let lin = (omega_closed(&p, &combo, &w) - (a * o1 + b * o2)).abs() / scale;
                let anti = (omega_closed(&p, &v, &w) + omega_closed(&p, &w, &v)).abs();
                let err = lin.max(anti);
                Sample::new(err, lin < 1e-12 && anti == 0.0, format!("linearity {lin:.3e}, antisymmetry {anti:.3e}"))
            }
            "j_invariance" => {
                let p = self.random_point(rng);
                let (v, w) = (sample_tangent(rng, m), sample_tangent(rng, m));
                let err = (omega_closed(&p, &v.rotate(), &w.rotate()) - omega_closed(&p, &v, &w)).abs();
                Sample::below(err, 1e-12)
            }
            "gamma_invariance" => {
                let g = self.random_group_element(rng)?;
                let p = self.random_point(rng);
                let (v, w) = (sample_tangent(rng, m), sample_tangent(rng, m));
                match invariance_residual(k, &g, &p, &v, &w) {
                    Ok(r) => Sample::new(
                        r.max(),
                        r.max() < INVARIANCE_TOL,
                        format!("omega {:.3e}, d^c {:.3e}, dc at p {:.6e}", r.omega, r.dc, dc_logphi(&p, &v)),
                    ),
                    Err(e) => Sample::new(f64::NAN, false, e.to_string()),
                }
            }
            "semipositivity" => {
                let p = self.random_point(rng);
                let (v, _) = self.random_split_tangent(rng);
                let value = semipositivity_check(&p, &v);
                let h_small = v.v[..s].iter().all(|z| z.norm() < ZERO_MODULUS);
                let ok = value >= SEMIPOSITIVE_FLOOR && ((value == 0.0) == h_small);
                Sample::new(value, ok, format!("omega(v, Iv) = {value:.6e}, H-part negligible {h_small}"))
            }
            "stokes" => {
                let r = tol.stokes_radius / (1 << trial) as f64;
                let mut z = vec![Complex64::new(0.0, 0.0); m];
                for zi in z.iter_mut().take(s) {
                    *zi = Complex64::new(0.0, 2.0);
                }
                let p0 = Point::new(z, s)?;
                let rep = stokes_residual(&p0, r, 0, tol.quadrature_surface, tol.quadrature_boundary)?;
                Sample::new(
                    rep.residual,
                    rep.residual < STOKES_TOL,
                    format!("r = {r}, surface {:.12e}, boundary {:.12e}", rep.surface_integral, rep.boundary_integral),
                )
            }
            "kernel_characterization" => {
                let p = self.random_point(rng);
                let (v, flat) = self.random_split_tangent(rng);
                let a = zero_direction_test(&p, &v);
                let b = semipositivity_check(&p, &v) < 1e-12;
                let c = in_flat_directions(&v, s);
                Sample::new(if a { 0.0 } else { 1.0 }, a == b && b == c && c == flat, format!("tests {a} {b} {c}, sampled flat {flat}"))
            }
            "leaf_certificates" => {
                let (w, g) = &self.words[trial];
                let cert = fixed_point(k, g, tol.tau_sign)?;
                let real_ok = match &cert.kind {
                    CertificateKind::RealFixedPoint { values } => values.iter().all(|x| x.is_finite()),
                    CertificateKind::NoSolution { .. } => true,
                    CertificateKind::IdentityRejected => false,
                };
                let ok = real_ok && cert.max_imag == 0.0 && cert.substitution_residual < SUBSTITUTION_TOL;
                Sample::new(cert.substitution_residual, ok, format!("word {}: {:?}", word_label(w), cert.kind))
            }
            "translation_no_solution" => {
                let a = self.random_element(rng);
                let g = GroupElement::translation(k, a.clone());
                let cert = fixed_point(k, &g, tol.tau_sign)?;
                let smallest = k.embed(&a)[..s].iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
                let ok = matches!(cert.kind, CertificateKind::NoSolution { .. }) && smallest > tol.tau_sign;
                Sample::new(smallest, ok, format!("a = {a}, min |s_i(a)| {smallest:.3e}"))
            }
            "curve_integral" => {
                let leafwise = trial.is_multiple_of(4);
                let (curve, p0) = random_disk_map(rng, s, k.t(), 3, leafwise);
                let value = holomorphic_curve_integral(&curve, &p0, tol.quadrature_curve)?;
                let ok = value >= CURVE_FLOOR && ((value.abs() <= CURVE_ZERO) == curve.is_leafwise(s));
                Sample::new(value, ok, format!("integral {value:.6e}, leafwise {leafwise}"))
            }
            other => return Err(OtError::Config(format!("unknown suite '{other}'"))),
        })
    }

    /// A failing trial becomes a failure record unless it is a precision fault,
    /// which aborts the run.
    fn sample_or_failure(&self, name: &str, trial: usize) -> Result<Sample> {
        match self.run_trial(name, trial) {
            Ok(s) => Ok(s),
            Err(e) if e.exit_code() == 3 => Err(e),
            Err(e) => Ok(Sample::new(f64::NAN, false, e.to_string())),
        }
    }

    pub fn run_suite(&self, spec: &SuiteSpec, only_trial: Option<usize>) -> Result<SuiteResult> {
        let indices: Vec<usize> = match only_trial {
            Some(t) if t >= spec.trials => {
                return Err(OtError::Config(format!("suite {} has {} trials, asked for {t}", spec.name, spec.trials)))
            }
            Some(t) => vec![t],
            None => (0..spec.trials).collect(),
        };
        let samples: Vec<Sample> =
            indices.par_iter().map(|&t| self.sample_or_failure(spec.name, t)).collect::<Result<_>>()?;
        let finite = || samples.iter().map(|s| s.value).filter(|v| v.is_finite());
        let failures: Vec<FailureRecord> = indices
            .iter()
            .zip(&samples)
            .filter(|(_, s)| !s.ok)
            .map(|(&t, s)| FailureRecord {
                suite: spec.name.to_string(),
                trial: t,
                seed: self.config.seed,
                trial_seed: trial_seed(self.config.seed, spec.name, t),
                value: s.value,
                detail: s.detail.clone(),
            })
            .collect();
        let failed = failures.len();
        Ok(SuiteResult {
            name: spec.name.to_string(),
            module: spec.module,
            criterion: spec.criterion,
            trials: indices.len(),
            passed: failed == 0,
            failed,
            max: finite().fold(f64::NEG_INFINITY, f64::max),
            min: finite().fold(f64::INFINITY, f64::min),
            failures: failures.into_iter().take(MAX_FAILURE_RECORDS).collect(),
        })
    }

    /// Runs every suite, or one suite (optionally one trial of it) for replay.
    /// Suites run concurrently; results keep the order of [`Context::specs`].
    pub fn run(&self, only: Option<&str>, only_trial: Option<usize>) -> Result<Vec<SuiteResult>> {
        let specs = self.specs();
        let selected: Vec<SuiteSpec> = match only {
            Some(name) => {
                let spec = specs
                    .iter()
                    .find(|s| s.name == name)
                    .ok_or_else(|| OtError::Config(format!("unknown suite '{name}'")))?;
                vec![*spec]
            }
            None if only_trial.is_some() => return Err(OtError::Config("a trial index needs a suite name".into())),
            None => specs,
        };
        selected.par_iter().map(|spec| self.run_suite(spec, only_trial)).collect()
    }
}

/// `k -> (i, j)` with `j <= i`, enumerating the lower triangle row by row.
fn triangular(k: usize) -> (usize, usize) {
    let mut i = ((((8 * k + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while i * (i + 1) / 2 > k {
        i -= 1;
    }
    while (i + 1) * (i + 2) / 2 <= k {
        i += 1;
    }
    (i, k - i * (i + 1) / 2)
}

pub fn cmd_signature(config: &Config) -> Result<Report> {
    let field = build_field(config)?;
    let mut report = Report::new("signature", config);
    report.field = Some(FieldSummary::new(&field));
    Ok(report)
}

fn units_stage(config: &Config) -> Result<(NumberField, Vec<FoundUnit>, Vec<Unit>)> {
    let field = build_field(config)?;
    let found = search_units(&field, config.unit_bound, config.tolerances.tau_sign)?;
    let gens = select_generators(&field, &found, config.tolerances.tau_det)?;
    Ok((field, found, gens))
}

pub fn cmd_units(config: &Config) -> Result<Report> {
    let (field, found, gens) = units_stage(config)?;
    let mut report = Report::new("units", config);
    report.field = Some(FieldSummary::new(&field));
    report.units = Some(UnitsSummary::new(&field, config.unit_bound, &found, gens));
    Ok(report)
}

pub fn cmd_admissible(config: &Config) -> Result<Report> {
    let (field, found, gens) = units_stage(config)?;
    let cert = check_admissible(&field, &gens, config.tolerances.tau_det, config.tolerances.tau_sign)?;
    let mut report = Report::new("admissible", config);
    report.passed = cert.verdict == Verdict::Admissible;
    report.field = Some(FieldSummary::new(&field));
    report.units = Some(UnitsSummary::new(&field, config.unit_bound, &found, gens));
    report.certificate = Some(cert);
    Ok(report)
}

/// Certificate for a single word. A word equal to the identity is reported
/// as `identity_rejected` and does not pass.
pub fn cmd_fixed_point(config: &Config, word: &str) -> Result<Report> {
    let letters = parse_word(word)?;
    let (field, found, gens) = units_stage(config)?;
    let g = word_element(&field, &gens, &letters)?;
    let certificate = if g.is_identity() {
        DisjointnessCertificate::identity_rejected(g)
    } else {
        fixed_point(&field, &g, config.tolerances.tau_sign)?
    };
    let mut report = Report::new("fixed-point", config);
    report.passed = certificate.is_certified();
    report.field = Some(FieldSummary::new(&field));
    report.units = Some(UnitsSummary::new(&field, config.unit_bound, &found, gens));
    report.fixed_point = Some(WordCertificate { word: word_label(&letters), certificate });
    Ok(report)
}

pub fn cmd_verify(config: &Config, only: Option<&str>, only_trial: Option<usize>) -> Result<Report> {
    let ctx = Context::new(config)?;
    let suites = ctx.run(only, only_trial)?;
    let cert = check_admissible(&ctx.field, &ctx.gens, config.tolerances.tau_det, config.tolerances.tau_sign)?;
    let mut report = Report::new("verify", config);
    report.passed = suites.iter().all(|s| s.passed);
    report.field = Some(FieldSummary::new(&ctx.field));
    report.units = Some(UnitsSummary::new(&ctx.field, config.unit_bound, &ctx.found, ctx.gens.clone()));
    report.certificate = Some(cert);
    report.suites = suites;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> Config {
        let mut cfg = Config::new(vec![-1, -1, 0, 1]);
        cfg.unit_bound = 2;
        cfg.trials = crate::config::Trials::uniform(5);
        cfg.trials.leaf_word_length = 2;
        cfg.tolerances.quadrature_surface = 128;
        cfg.tolerances.quadrature_boundary = 128;
        cfg
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(0, "stokes", 1), trial_seed(0, "stokes", 1));
        assert_ne!(trial_seed(0, "stokes", 1), trial_seed(0, "stokes", 0));
        assert_ne!(trial_seed(0, "stokes", 1), trial_seed(0, "semipositivity", 1));
        assert_ne!(trial_seed(0, "stokes", 1), trial_seed(1, "stokes", 1));
    }

    #[test]
    fn triangular_enumerates_pairs() {
        let pairs: Vec<_> = (0..6).map(triangular).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]);
        assert_eq!(triangular(5050 + 3), (100, 3));
    }

    #[test]
    fn small_verify_passes() {
        let report = cmd_verify(&small_config(), None, None).unwrap();
        let failed: Vec<_> = report.suites.iter().filter(|s| !s.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn single_trial_replay_matches() {
        let cfg = small_config();
        let full = cmd_verify(&cfg, Some("omega_vs_fd"), None).unwrap();
        let one = cmd_verify(&cfg, Some("omega_vs_fd"), Some(3)).unwrap();
        assert_eq!(one.suites[0].trials, 1);
        assert!(one.suites[0].max <= full.suites[0].max);
        assert!(cmd_verify(&cfg, Some("nope"), None).is_err());
        assert!(cmd_verify(&cfg, Some("stokes"), Some(2)).is_err());
    }

    #[test]
    fn fixed_point_command() {
        let report = cmd_fixed_point(&small_config(), "u a").unwrap();
        let cert = &report.fixed_point.as_ref().unwrap().certificate;
        let CertificateKind::RealFixedPoint { values } = &cert.kind else { panic!() };
        assert!((values[0] + 3.0796).abs() < 1e-4);
        let id = cmd_fixed_point(&small_config(), "u u^-1").unwrap();
        assert!(!id.passed);
    }
}
