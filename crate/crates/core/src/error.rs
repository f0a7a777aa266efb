use thiserror::Error;

/// Errors raised by the kinematics, geometry and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShellError {
    #[error("matrix is not skew-symmetric: |A + A^T| = {0:e}")]
    NotSkew(f64),

    #[error("degenerate chart at ({x1}, {x2}): {reason}")]
    DegenerateChart { x1: f64, x2: f64, reason: String },

    #[error("director frame is not orthonormal: defect {0:e}")]
    FrameNotOrthonormal(f64),

    #[error("reference director d3 deviates from the surface normal by {0:e}")]
    DirectorNotNormal(f64),

    #[error("point ({0}, {1}) lies outside the chart domain")]
    OutsideDomain(f64, f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid degrees of freedom: {0}")]
    InvalidDofs(String),

    #[error("line search failed at iteration {iteration} (gradient norm {gradient_norm:e})")]
    LineSearchFailed { iteration: usize, gradient_norm: f64 },

    #[error("energy evaluated to a non-finite value")]
    NonFiniteEnergy,
}

pub type Result<T> = std::result::Result<T, ShellError>;
