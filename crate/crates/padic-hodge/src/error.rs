use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A value became indistinguishable from zero at the available precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A reliable Laurent window shrank to nothing.
    #[error("window exhausted: {0}")]
    WindowExhausted(String),

    /// Mixed elements of structurally different rings.
    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    /// An inverse-limit sequence failed its compatibility contract.
    #[error("incompatible sequence at index {index}: {detail}")]
    Incompatible { index: usize, detail: String },

    /// Division by the kernel generator was requested outside the kernel.
    #[error("element not in ker(theta) at current precision (residual valuation {0})")]
    NotInKernel(i64),

    /// Valuation of a tilt element could not be determined.
    #[error("valuation indeterminate: {0}")]
    ValuationIndeterminate(String),

    /// A unit was required.
    #[error("not a unit: {0}")]
    NotAUnit(String),

    /// A 1-cochain failed the cocycle condition.
    #[error("not a cocycle: residual divisor exponent {0}")]
    NotACocycle(i64),

    /// Invalid configuration or precision profile.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Structure-polynomial cache refused to load.
    #[error("cache rejected: {0}")]
    Cache(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
