use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation requires a non-constant polynomial")]
    ConstantInput,
    #[error("invalid rewrite rule: {0}")]
    InvalidRule(String),
    #[error("homogenizing variable occurs in the polynomial")]
    HomVarOccurs,
    #[error("variable index {index} out of range for a point with {len} coordinates")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("projective point has no non-zero coordinate")]
    ZeroPoint,
    #[error("order bound {bound} is below the generator order {needed}")]
    BoundTooSmall { bound: usize, needed: usize },
    #[error("invalid ideal presentation: {0}")]
    InvalidPresentation(String),
    #[error("generator is not delta-homogeneous in the projective variables: {0}")]
    NotHomogeneous(String),
    #[error("equation is not of type I")]
    NotTypeI,
    #[error("equation is not of type II")]
    NotTypeII,
    #[error("invalid Laurent equation: {0}")]
    InvalidEquation(String),
    #[error("unsupported substitution rule for this procedure")]
    UnsupportedRule,
    #[error("malformed certificate step {index}: {reason}")]
    MalformedStep { index: usize, reason: String },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
