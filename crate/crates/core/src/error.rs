use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator size mismatch: L={left} vs L={right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("number of sites L={l} outside supported range {min}..={max}")]
    SitesOutOfRange { l: usize, min: usize, max: usize },

    #[error("spectral parameter u={u} outside the open interval (0, pi/4)")]
    SpectralParameter { u: f64 },

    #[error("x must be nonzero (T has a pole of order L at x=0)")]
    ZeroX,

    #[error("eigensolver did not converge for dim={dim} after {max_iterations} iterations (eps={eps:e})")]
    EigenNoConvergence {
        dim: usize,
        max_iterations: usize,
        eps: f64,
    },

    #[error(
        "interpolation residual {residual:e} at validation node x={node} exceeds tolerance {tol:e}"
    )]
    InterpolationResidual { node: f64, residual: f64, tol: f64 },

    #[error("operator is not an involution: |R^2 - 1| / |1| = {residual:e} > {tol:e}")]
    NotInvolution { residual: f64, tol: f64 },

    #[error("order {order} requires L > {threshold}, got L={l}")]
    BelowThreshold {
        order: usize,
        threshold: usize,
        l: usize,
    },

    #[error(
        "Bell polynomial arguments {i} and {j} do not commute (relative residual {residual:e})"
    )]
    NonCommuting { i: usize, j: usize, residual: f64 },

    #[error("Bell polynomial order {n} exceeds number of arguments {available}")]
    BellOrder { n: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
