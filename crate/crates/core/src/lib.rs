//! Oeljeklaus-Toma manifold data from a number field, and numerical
//! certificates for the exact semipositive (1,1)-form and its zero foliation.
//!
//! The pipeline runs bottom-up:
//!
//! * [`field`]: the order `Z[a]` of `K = Q[x]/(f)`, exact norms, embeddings.
//! * [`units`]: units, total positivity, the log embedding, admissibility.
//! * [`group`]: `U x| O_K` and its affine action on `H^s x C^t`.
//! * [`forms`]: the potential `log phi`, the form `omega`, `d^c log phi`, Stokes.
//! * [`foliation`]: zero-foliation tests and leaf-disjointness certificates.
//! * [`suites`] / [`report`]: seeded verification suites and JSON reports.

// `!(x > 0.0)` is used on purpose so NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod field;
pub mod fixed;
pub mod foliation;
pub mod forms;
pub mod group;
pub mod report;
pub mod suites;
pub mod units;

pub use error::{OtError, Result};
pub use field::{AlgebraicInt, EmbeddingSet, FieldOptions, IntPolynomial, NumberField};
pub use group::{GroupElement, Point, Tangent};
pub use units::{AdmissibleCertificate, LogVector, Unit};
