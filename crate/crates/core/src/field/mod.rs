//! Exact arithmetic in `Z[a]` and high-precision embeddings of `K = Q[x]/(f)`.

mod element;
mod poly;
mod roots;

pub use element::{AlgebraicInt, FieldOptions, NumberField};
pub use poly::{real_root_count, resultant, validate_polynomial, validate_polynomial_big, IntPolynomial, MAX_SEARCH_DEGREE};
pub use roots::{compute_embeddings, EmbeddingSet, DEFAULT_EPS_ROOT, DEFAULT_PRECISION_BITS};
