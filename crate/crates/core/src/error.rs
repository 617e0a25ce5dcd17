use thiserror::Error;

/// Errors raised by the geometry, field and measurement kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CqgError {
    #[error("degenerate chart `{chart}`: |det g| = {det:e} at {point:?}")]
    DegenerateChart {
        chart: String,
        det: f64,
        point: Vec<f64>,
    },

    #[error("coordinate {coord} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        coord: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("coordinate singularity: coordinate {coord} = {value} is within {margin:e} of a polar end")]
    CoordinateSingularity { coord: usize, value: f64, margin: f64 },

    #[error("wavefunction node at {point:?}: amplitude {amplitude:e} is below tolerance")]
    Node { point: Vec<f64>, amplitude: f64 },

    #[error("curvature pole: denominator {denominator:e} vanishes")]
    Pole { denominator: f64 },

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("invalid gauge: lambda = {value} at {point:?}")]
    InvalidGauge { value: f64, point: Vec<f64> },

    #[error("weight mismatch: expected {expected}, got {actual}")]
    WeightMismatch { expected: f64, actual: f64 },

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("amplitudes not normalized: |a|^2 + |b|^2 = {0}")]
    NotNormalized(f64),

    #[error("invalid Euler angles: {0}")]
    InvalidAngles(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("quadrature order too low: {0}")]
    QuadratureOrderTooLow(String),

    #[error("non-finite integrand value {value} at node {node:?}")]
    NonFinite { value: f64, node: Vec<f64> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CqgError>;
