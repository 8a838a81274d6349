use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported sphere dimension {0} (only d = 1 and d = 2 are supported)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected S^{expected}, got S^{got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cannot build a point on the sphere from a zero or non-finite vector")]
    DegenerateVector,

    #[error("cap radius {0} is not admissible (must lie in (0, pi - 0.1])")]
    InvalidCapRadius(f64),

    #[error("collar radii ({alpha}, {beta}) are not admissible: {reason}")]
    InvalidCollar { alpha: f64, beta: f64, reason: &'static str },

    #[error("point at polar angle {polar_angle} lies outside the domain")]
    OutsideDomain { polar_angle: f64 },

    #[error("argument {value} lies outside the interval [-{alpha}, {alpha}]")]
    OutsideInterval { value: f64, alpha: f64 },

    #[error("polar angle {0} exceeds pi/8, the range of the dilation map")]
    DilationRange(f64),

    #[error("degree {0} exceeds the quadrature cap of 200")]
    DegreeOverflow(usize),

    #[error("adaptive integration did not converge by order 200 (last estimates {previous} and {last})")]
    NonConvergence { previous: f64, last: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),
}
