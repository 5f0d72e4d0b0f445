use thiserror::Error;

use crate::rational::Point;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vertices are not affinely independent")]
    Degenerate,

    #[error("point {0} is not in the simplex")]
    NotInSimplex(Point),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("C-simplex specs do not share apex and frame")]
    MismatchedSpecs,

    #[error("not a common face: {first} and {second} meet outside their shared face")]
    NotCommonFace { first: String, second: String },

    #[error("point {0} lies outside the complex")]
    OutsideComplex(Point),

    #[error("subpolyhedron is not contained in the complex (generator {0})")]
    NotContained(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("blow-up budget of {0} operations exhausted")]
    BudgetExhausted(u64),

    #[error("carrier is not regular: cell {0}")]
    NonRegularCarrier(String),

    #[error("den({value}) does not divide den({vertex}) at vertex {vertex}")]
    Divisibility { vertex: Point, value: Point },

    #[error("affine piece on cell {0} does not have integer coefficients")]
    NonIntegralPiece(String),

    #[error("zero residual at sequence index {index}: x_i - x lies in the span of the frame")]
    ZeroResidual { index: usize },

    #[error("no generator admits the frame: {0}")]
    NoAdmissibleGenerator(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
