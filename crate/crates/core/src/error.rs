use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown variable `{name}` at byte {position}")]
    UnknownVariable { name: String, position: usize },

    #[error("negative exponent at byte {position}")]
    NegativeExponent { position: usize },

    #[error("invalid variable list: {0}")]
    InvalidVariables(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,

    #[error("operation requires a non-constant polynomial")]
    ConstantPolynomial,

    #[error("ambient dimension {dim} exceeds the supported bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("Newton polyhedron is not convenient")]
    NotConvenient,

    #[error("degree {degree} exceeds the polyhedron bound M = {bound}")]
    DegreeExceedsBound { degree: u32, bound: u32 },

    #[error("index set must be a proper subset of the variables")]
    FullIndexSet,

    #[error("supporting vector must have nonnegative entries")]
    NegativeSupport,

    #[error("missing moment for exponent {0:?}")]
    MissingMoment(Vec<u32>),

    #[error("relaxation order {order} is below the degree floor {floor}")]
    OrderTooSmall { order: u32, floor: u32 },

    #[error("too many constraints for preordering mode: {count} > {max}")]
    PreorderingBlowup { count: usize, max: usize },

    #[error("empty search box")]
    EmptyBox,

    #[error("malformed SDP: {0}")]
    MalformedSdp(String),

    #[error("SDP size {size} exceeds the dense solver guard {max}")]
    SdpTooLarge { size: usize, max: usize },

    #[error("SDPA export requires equality constraints to be resolved first")]
    UnresolvedEqualities,

    #[error("SDPA parse error on line {line}: {message}")]
    SdpaParse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
