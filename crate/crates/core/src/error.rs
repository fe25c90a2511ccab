use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid arc: start {start}, length {length}")]
    InvalidArc { start: f64, length: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at cell {cell}")]
    NonFinite { cell: usize, value: f64 },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("level {target} unreachable: function only reaches {reached} at the search ceiling")]
    Unreachable { target: f64, reached: f64 },

    #[error("level {target} lies below the function floor {floor}")]
    BelowRange { target: f64, floor: f64 },

    #[error("norm is infinite: modular at the ceiling scale is {modular}, threshold {threshold}")]
    NormInfinite { modular: f64, threshold: f64 },

    #[error("level tree exceeded {max_level} levels with a nonempty frontier")]
    TreeTooDeep { max_level: i32 },

    #[error("infeasible good-lambda parameters: 2*delta*C*(2*beta)^(2*log2 C') = {value} >= 1")]
    Infeasible { value: f64 },

    #[error("harmonic function is not real-valued (coefficient mismatch {mismatch})")]
    NotReal { mismatch: f64 },

    #[error("point {modulus} is not inside the unit disc")]
    OutsideDisc { modulus: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
