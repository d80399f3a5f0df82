use thiserror::Error;

/// Errors raised by curve construction and curve operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point has no coordinates")]
    EmptyPoint,
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("curve has no vertices")]
    EmptyCurve,
    #[error("bisector of two equal points is undefined")]
    DegenerateBisector,
    #[error("position (edge {edge}, t {t}) is not on the curve")]
    InvalidPosition { edge: usize, t: f64 },
    #[error("start position lies after end position")]
    PositionOrder,
    #[error("curve needs at least {needed} vertices, has {found}")]
    TooFewVertices { needed: usize, found: usize },
    #[error("curve has {found} vertices, limit is {limit}")]
    TooManyVertices { limit: usize, found: usize },
    #[error("parameter {name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("unknown curve family `{0}`")]
    UnknownFamily(String),
}
