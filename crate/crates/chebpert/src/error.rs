//! Crate-wide error type.

/// Errors produced by construction and evaluation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A sampled function returned NaN or infinity at a quadrature/interpolation node.
    #[error("non-finite sample at node {index} (x = {x}): {context}")]
    NonFiniteSample { index: usize, x: f64, context: String },

    /// A series expansion did not meet its tail criterion at the maximum degree.
    #[error("series under-resolved: {0}")]
    UnderResolved(String),

    /// Squared norms collapsed below the cancellation floor; advise a larger quadrature.
    #[error("precision loss at degree {n}: {detail}; increase the quadrature size")]
    PrecisionLoss { n: usize, detail: String },

    /// Evaluation point is outside the accuracy domain of a quadrature formula.
    #[error("outside accuracy domain: {0}")]
    AccuracyDomain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Grid too coarse for reliable finite differences.
    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
