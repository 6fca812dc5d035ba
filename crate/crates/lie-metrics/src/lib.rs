//! Numerical sub-Finsler machinery on deformed Lie group structures.
//!
//! Built on the exact layer of `lie-core`: flows of piecewise-constant
//! horizontal controls are finite group products (no integration error),
//! distances are estimated as certified upper bounds by penalized descent
//! over segment values followed by an exact endpoint closure, and the
//! contracted / dilated metric families are evaluated intrinsically on the
//! deformed structures.

pub mod control;
pub mod correct;
pub mod fast;
pub mod norm;
pub mod oracle;
pub mod probe;
pub mod solver;
pub mod structure;

pub use control::ControlPath;
pub use norm::NormSpec;
pub use solver::{estimate_distance, lift_control, DistanceEstimate, SolverConfig};
pub use structure::{MetricFamily, MetricStructure};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error(transparent)]
    Algebra(#[from] lie_core::AlgebraError),
    #[error("control path epsilon {path} does not match structure epsilon {structure}")]
    EpsilonMismatch { path: f64, structure: f64 },
    #[error("segment value has dimension {got}, distribution has dimension {want}")]
    SegmentDimension { got: usize, want: usize },
    #[error("norm specification invalid: {0}")]
    BadNorm(String),
    #[error("solver failed to converge: {0}")]
    NoConvergence(String),
    #[error("operation requires the {0} side of the family")]
    WrongSide(&'static str),
}
