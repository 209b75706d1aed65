use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type.
///
/// Variants split into three families, and the CLI maps them to exit codes
/// accordingly: malformed input (exit 2), numerically unresolved situations
/// that a tighter tolerance or a different sample might fix (exit 3), and
/// internal consistency failures that indicate a bug (exit 4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unsupported operation at byte {position}: {message}")]
    UnsupportedOperation { position: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid job: {0}")]
    Job(String),

    #[error("point lies within {band:.3e} of the curve (distance {distance:.3e})")]
    TooCloseToCurve { distance: f64, band: f64 },

    #[error("target value lies within {band:.3e} of the image of the curve (distance {distance:.3e})")]
    TooCloseToImage { distance: f64, band: f64 },

    #[error("pole on or near the curve at z = {location}")]
    PoleOnCurve { location: Complex64 },

    #[error("zero or pole persists on a cell edge near {location} after grid perturbation")]
    BoundaryHit { location: Complex64 },

    #[error(
        "unresolved zero/pole cluster in cell [{re_lo}, {re_hi}] x [{im_lo}, {im_hi}] at the resolution floor"
    )]
    UnresolvedCluster {
        re_lo: f64,
        re_hi: f64,
        im_lo: f64,
        im_hi: f64,
    },

    #[error("continuation step collapsed at z = {z} (parameter {theta:.6})")]
    StepCollapse { z: Complex64, theta: f64 },

    #[error("|f| deviates from 1 on the unit circle by {deviation:.3e}")]
    NotBoundaryUnimodular { deviation: f64 },

    #[error("Blaschke zero {zero} has modulus {modulus} >= 1")]
    InvalidZero { zero: Complex64, modulus: f64 },

    #[error("unimodular constant has modulus {modulus}, expected 1")]
    InvalidConstant { modulus: f64 },

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::UnsupportedOperation { .. } => "unsupported_operation",
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Geometry(_) => "geometry",
            Error::Job(_) => "job",
            Error::TooCloseToCurve { .. } => "too_close_to_curve",
            Error::TooCloseToImage { .. } => "too_close_to_image",
            Error::PoleOnCurve { .. } => "pole_on_curve",
            Error::BoundaryHit { .. } => "boundary_hit",
            Error::UnresolvedCluster { .. } => "unresolved_cluster",
            Error::StepCollapse { .. } => "step_collapse",
            Error::NotBoundaryUnimodular { .. } => "not_boundary_unimodular",
            Error::InvalidZero { .. } => "invalid_zero",
            Error::InvalidConstant { .. } => "invalid_constant",
            Error::Indeterminate(_) => "indeterminate",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnsupportedOperation { .. }
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Geometry(_)
            | Error::Job(_)
            | Error::InvalidZero { .. }
            | Error::InvalidConstant { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::TooCloseToCurve { .. }
            | Error::TooCloseToImage { .. }
            | Error::PoleOnCurve { .. }
            | Error::BoundaryHit { .. }
            | Error::UnresolvedCluster { .. }
            | Error::StepCollapse { .. }
            | Error::NotBoundaryUnimodular { .. }
            | Error::Indeterminate(_) => 3,
            Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
