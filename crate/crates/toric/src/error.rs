//! One error type for the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration has no points")]
    EmptyConfig,
    #[error("points do not affinely span dimension {dim}: rank {rank}")]
    DegenerateSpan { dim: usize, rank: usize },
    #[error("duplicate point at labels {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },
    #[error("point {label} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        label: usize,
        got: usize,
        expected: usize,
    },
    #[error("dimension {dim} is not supported here")]
    UnsupportedDimension { dim: usize },

    #[error("lifting supplies {got} values for {expected} points")]
    MissingLiftValue { got: usize, expected: usize },

    #[error("face references label {label}, but the configuration has {len} points")]
    LabelOutOfRange { label: usize, len: usize },
    #[error("facet {face} spans dimension {got}, expected {expected}")]
    FacetDimension {
        face: usize,
        got: usize,
        expected: usize,
    },
    #[error("facets cover {covered} of the hull volume {total}")]
    CoverageGap { covered: String, total: String },
    #[error("facets {first} and {second} overlap in their interiors")]
    OverlapViolation { first: usize, second: usize },
    #[error("facets {first} and {second} meet badly: {reason}")]
    BadIntersection {
        first: usize,
        second: usize,
        reason: String,
    },
    #[error("decomposition does not match the configuration: {reason}")]
    UnvalidatedInput { reason: String },

    #[error("{what}: got {got} entries for {expected} points")]
    WrongCount {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("point lies outside the patch domain")]
    OutsideDomain,
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("weight {label} is {value}, weights must be positive and finite")]
    NonpositiveWeight { label: usize, value: f64 },
    #[error("invalid binomial relation: {reason}")]
    InvalidRelation { reason: String },

    #[error("degeneration parameter t = {t} must be positive")]
    NonpositiveT { t: f64 },
    #[error("face {face} is not a subset of the configuration")]
    FaceNotSubset { face: usize },
    #[error("sampled set is empty")]
    EmptySet,
    #[error("resolution m = {m} must be at least 2")]
    BadResolution { m: usize },
    #[error("schedule must be nonempty, strictly increasing, with t >= 1")]
    BadSchedule,

    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {message}")]
    SchemaError { message: String },
    #[error("{context}: {source}")]
    IoError {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("linear program did not terminate")]
    LpStalled,
}
