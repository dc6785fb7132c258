use thiserror::Error;

/// Errors produced by the quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature order {p} outside the supported range {min}..={max}")]
    InvalidOrder { p: usize, min: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite input {value} at position {index}")]
    NonFiniteInput { index: usize, value: f64 },

    #[error("integrand returned {value} at x = {x}")]
    NonFiniteValue { x: f64, value: f64 },

    #[error("smoothness ratio must be non-negative, got {0}")]
    InvalidXi(f64),

    #[error("segment [{a}, {b}] is already at the minimal width {h_min:e}")]
    BelowMinimumWidth { a: f64, b: f64, h_min: f64 },

    #[error("hp-mesh is empty")]
    EmptyMesh,
}

pub type Result<T> = std::result::Result<T, QuadError>;
