//! Run configuration, read from JSON. Every field except `polynomial` has a default.

use serde::{Deserialize, Serialize};

use crate::error::{OtError, Result};
use crate::field::{FieldOptions, DEFAULT_EPS_ROOT, DEFAULT_PRECISION_BITS};
use crate::forms::{DEFAULT_FD_STEP, DEFAULT_QUADRATURE, DEFAULT_STOKES_RADIUS};
use crate::units::{DEFAULT_TAU_DET, DEFAULT_TAU_SIGN};

/// Trial counts per suite. Deterministic suites ignore these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Trials {
    pub mul_homomorphism: usize,
    pub norm_consistency: usize,
    pub action_homomorphism: usize,
    pub inverse_exact: usize,
    pub h_preservation: usize,
    pub associativity: usize,
    pub omega_vs_fd: usize,
    pub bilinearity: usize,
    pub j_invariance: usize,
    pub gamma_invariance: usize,
    pub semipositivity: usize,
    pub kernel_characterization: usize,
    pub translation_no_solution: usize,
    pub curve_integral: usize,
    /// Words up to this length are certified exhaustively.
    pub leaf_word_length: usize,
    /// Random words for the group and invariance suites have at most this length.
    pub random_word_length: usize,
}

impl Default for Trials {
    fn default() -> Self {
        Trials {
            mul_homomorphism: 200,
            norm_consistency: 200,
            action_homomorphism: 500,
            inverse_exact: 500,
            h_preservation: 500,
            associativity: 200,
            omega_vs_fd: 1000,
            bilinearity: 200,
            j_invariance: 200,
            gamma_invariance: 500,
            semipositivity: 10_000,
            kernel_characterization: 10_000,
            translation_no_solution: 200,
            curve_integral: 100,
            leaf_word_length: 3,
            random_word_length: 3,
        }
    }
}

impl Trials {
    /// Every sampled suite set to `n` trials; word lengths keep their defaults.
    pub fn uniform(n: usize) -> Self {
        Trials {
            mul_homomorphism: n,
            norm_consistency: n,
            action_homomorphism: n,
            inverse_exact: n,
            h_preservation: n,
            associativity: n,
            omega_vs_fd: n,
            bilinearity: n,
            j_invariance: n,
            gamma_invariance: n,
            semipositivity: n,
            kernel_characterization: n,
            translation_no_solution: n,
            curve_integral: n,
            ..Trials::default()
        }
    }

    fn counts(&self) -> [(&'static str, usize); 16] {
        [
            ("mul_homomorphism", self.mul_homomorphism),
            ("norm_consistency", self.norm_consistency),
            ("action_homomorphism", self.action_homomorphism),
            ("inverse_exact", self.inverse_exact),
            ("h_preservation", self.h_preservation),
            ("associativity", self.associativity),
            ("omega_vs_fd", self.omega_vs_fd),
            ("bilinearity", self.bilinearity),
            ("j_invariance", self.j_invariance),
            ("gamma_invariance", self.gamma_invariance),
            ("semipositivity", self.semipositivity),
            ("kernel_characterization", self.kernel_characterization),
            ("translation_no_solution", self.translation_no_solution),
            ("curve_integral", self.curve_integral),
            ("leaf_word_length", self.leaf_word_length),
            ("random_word_length", self.random_word_length),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub tau_det: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub tau_sign: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub eps_root: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub fd_step: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub stokes_radius: f64,
    pub quadrature_surface: usize,
    pub quadrature_boundary: usize,
    pub quadrature_curve: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_det: DEFAULT_TAU_DET,
            tau_sign: DEFAULT_TAU_SIGN,
            eps_root: DEFAULT_EPS_ROOT,
            fd_step: DEFAULT_FD_STEP,
            stokes_radius: DEFAULT_STOKES_RADIUS,
            quadrature_surface: DEFAULT_QUADRATURE,
            quadrature_boundary: DEFAULT_QUADRATURE,
            quadrature_curve: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Coefficients `c_0, .., c_n`, ascending degree, monic.
    pub polynomial: Vec<i64>,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    #[serde(default = "default_bound")]
    pub unit_bound: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trials: Trials,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub assume_irreducible: bool,
}

fn default_bits() -> u32 {
    DEFAULT_PRECISION_BITS
}

fn default_bound() -> u32 {
    5
}

impl Config {
    pub fn new(polynomial: Vec<i64>) -> Self {
        Config {
            polynomial,
            precision_bits: default_bits(),
            unit_bound: default_bound(),
            seed: 0,
            trials: Trials::default(),
            tolerances: Tolerances::default(),
            assume_irreducible: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| OtError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in self.trials.counts() {
            if n == 0 {
                return Err(OtError::Config(format!("trials.{name} must be at least 1")));
            }
        }
        let t = &self.tolerances;
        let floats =
            [("tau_det", t.tau_det), ("tau_sign", t.tau_sign), ("eps_root", t.eps_root), ("fd_step", t.fd_step), ("stokes_radius", t.stokes_radius)];
        for (name, x) in floats {
            if !(x > 0.0 && x.is_finite()) {
                return Err(OtError::Config(format!("tolerances.{name} must be positive, got {x}")));
            }
        }
        for (name, n) in [
            ("quadrature_surface", t.quadrature_surface),
            ("quadrature_boundary", t.quadrature_boundary),
            ("quadrature_curve", t.quadrature_curve),
        ] {
            if n == 0 {
                return Err(OtError::Config(format!("tolerances.{name} must be at least 1")));
            }
        }
        if self.unit_bound == 0 {
            return Err(OtError::Config("unit_bound must be at least 1".into()));
        }
        if self.precision_bits < 64 {
            return Err(OtError::Config(format!("precision_bits must be at least 64, got {}", self.precision_bits)));
        }
        Ok(())
    }

    pub fn field_options(&self) -> FieldOptions {
        FieldOptions {
            precision_bits: self.precision_bits,
            eps_root: self.tolerances.eps_root,
            assume_irreducible: self.assume_irreducible,
        }
    }
}
