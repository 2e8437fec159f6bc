//! Fixtures shared by the benchmarks.

use otcurves_core::{FieldOptions, NumberField};

/// `x^3 - x - 1`, signature (1, 1).
pub const CUBIC: [i64; 4] = [-1, -1, 0, 1];
/// `x^4 - x - 1`, signature (2, 1).
pub const QUARTIC: [i64; 5] = [-1, -1, 0, 0, 1];

pub fn field(coeffs: &[i64]) -> NumberField {
    NumberField::new(coeffs, FieldOptions::default()).expect("fixture polynomial is valid")
}
