use thiserror::Error;

pub type Result<T> = std::result::Result<T, OtError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OtError {
    #[error("polynomial is empty")]
    EmptyPolynomial,
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(String),
    #[error("polynomial degree {0} is below 3")]
    DegreeTooSmall(usize),
    #[error("polynomial is reducible: monic factor with coefficients {0:?}")]
    Reducible(Vec<String>),
    #[error("irreducibility of degree-{0} polynomial not decided; pass --assume-irreducible")]
    IrreducibilityUndecided(usize),
    #[error("signature (s, t) = ({s}, {t}) unsupported: need s >= 1 and t >= 1")]
    SignatureUnsupported { s: usize, t: usize },
    #[error("root finding did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("root tolerance {eps:e} is below the resolution of {bits}-bit fixed point")]
    ToleranceBelowPrecision { eps: f64, bits: u32 },
    #[error("exact norm {exact} disagrees with floating product {approx}")]
    CrossCheckMismatch { exact: String, approx: f64 },
    #[error("element does not belong to the field of degree {0}")]
    DimensionMismatch(usize),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("sign of a real embedding undecided after precision escalation to {0} bits")]
    SignUndecidable(u32),
    #[error("no unit found with coefficients bounded by {0}; raise the bound")]
    NoUnitFound(u32),
    #[error("need {expected} generators, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },
    #[error("generator {0} is not totally positive")]
    NotTotallyPositive(usize),
    #[error("found units span rank {found} < {needed} in the projected log lattice")]
    InsufficientRank { found: usize, needed: usize },
    #[error("inverse does not lie in the order Z[alpha]")]
    InverseNotInOrder,
    #[error("point leaves H^s x C^t in slot {0}")]
    LeftHalfSpace(usize),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("finite-difference step {0:e} outside [1e-7, 1e-3]")]
    StepOutOfRange(f64),
    #[error("point is within {0:e} of the boundary of H")]
    NearBoundary(f64),
    #[error("disk leaves the domain in slot {0}")]
    DiskLeavesDomain(usize),
    #[error("holomorphic curve leaves the domain in slot {0}")]
    CurveLeavesDomain(usize),
    #[error("identity element has no disjointness certificate")]
    IdentityElement,
    #[error("embedding of u is within tolerance of 1 in slot {slot} although u != 1 ({bits} bits)")]
    EmbeddingDegenerate { slot: usize, bits: u32 },
    #[error("cannot parse word: {0}")]
    WordParse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl OtError {
    /// Process exit code: 2 for input/config errors, 3 for precision faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            OtError::ConvergenceFailure(_)
            | OtError::CrossCheckMismatch { .. }
            | OtError::SignUndecidable(_)
            | OtError::EmbeddingDegenerate { .. } => 3,
            _ => 2,
        }
    }
}
