use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight exponent must exceed -1, got {0}")]
    InvalidAlpha(f64),

    #[error("point {0} lies outside the open domain ({1})")]
    DomainViolation(Complex64, &'static str),

    #[error("non-finite value at {at} ({context})")]
    NonFinite { at: Complex64, context: &'static str },

    #[error("derivative order {order} not representable: {reason}")]
    DerivOrder { order: u32, reason: String },

    #[error("evaluation circle of radius {radius:.3e} around {center} leaves the domain")]
    CauchyCircle { center: Complex64, radius: f64 },

    #[error("candidate kernel at {at} is numerically inside the current span (residual {residual:.3e})")]
    DegenerateExtension { at: Complex64, residual: f64 },

    #[error("index {index} out of range for system of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("selection exhausted: {0}")]
    SelectionExhausted(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("mix coefficient bound not recorded for this decomposition")]
    MixBoundMissing,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("norm diverges: {0}")]
    NormDiverges(String),
}

pub type Result<T> = std::result::Result<T, Error>;
