use thiserror::Error;

use crate::spaces::GeometryKind;

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// A point or group element lies outside the chart of its geometry.
    #[error("point {point:?} is outside the chart of {kind}: {reason}")]
    Domain {
        kind: GeometryKind,
        point: [f64; 4],
        reason: &'static str,
    },

    #[error("invalid metric parameters for {kind}: {reason}")]
    InvalidParams { kind: GeometryKind, reason: String },

    /// `x³ − m x² + n x − 1` does not yield three distinct real roots.
    #[error("Sol4mn with (m, n) = ({m}, {n}) is not admissible: {reason}")]
    InvalidRoots { m: f64, n: f64, reason: String },

    #[error("finite-difference step {step} leaves the chart near {point:?}")]
    StepTooLarge { step: f64, point: [f64; 4] },

    #[error("vectors do not span a plane (area² = {area2:e})")]
    DegeneratePlane { area2: f64 },

    #[error("matrix is singular: {0}")]
    Singular(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
