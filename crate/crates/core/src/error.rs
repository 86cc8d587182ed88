//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction and validation across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("component count m must be at least 2, got {0}")]
    TooFewComponents(usize),

    #[error("component count m must be at most {max}, got {got}")]
    TooManyComponents { got: usize, max: usize },

    #[error("diffusion coefficients must be positive, got a = {a}, b = {b}")]
    NonPositiveCoefficients { a: f64, b: f64 },

    #[error("system is not parabolic: 2 b cos(pi/(m+1)) = {lhs} >= a = {a}")]
    NotParabolic { lhs: f64, a: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component {index} is negative ({value}); nonnegative orthant required")]
    NegativeComponent { index: usize, value: f64 },

    #[error("polynomial degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),

    #[error("theta weights must be positive and finite, got theta[{index}] = {value}")]
    NonPositiveTheta { index: usize, value: f64 },

    #[error("exponent tuple out of range: {reason}")]
    TupleOutOfRange { reason: String },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid reaction definition: {0}")]
    InvalidReaction(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("region membership failed: {0}")]
    RegionMembershipFailed(String),

    #[error("boundary data incompatible with region: {0}")]
    BoundaryIncompatible(String),

    #[error("positivity condition failed: {0}")]
    ConditionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
