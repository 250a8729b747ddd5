use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("domain error: {what} at x = {x}")]
    Domain { what: &'static str, x: f64 },

    #[error("no sign change of the residual on [{lo}, {hi}]")]
    NoRootFound { lo: f64, hi: f64 },

    #[error("non-finite state at x = {x}")]
    NonFinite { x: f64 },

    #[error("singular right-hand side at x = {x}, xi = {xi}: {reason}")]
    Singularity {
        x: f64,
        xi: f64,
        reason: &'static str,
    },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("knots must be strictly increasing (violated at index {index})")]
    NonIncreasingKnots { index: usize },

    #[error("x = {x} outside [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("trajectories do not share a common grid")]
    MismatchedGrid,

    #[error("segment {segment} of the splice covers no nodes")]
    SegmentUncovered { segment: usize },

    #[error("no switch point keeps both branches inside the mean-value bounds")]
    NoFeasibleSwitch,

    #[error("grid is not uniform (max/min spacing ratio {ratio})")]
    NonUniformGrid { ratio: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
