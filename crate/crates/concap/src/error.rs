use thiserror::Error;

/// Errors produced by the geometry, solver and optimization layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or circle violates the open unit disk domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two boundary circles intersect or touch; the integral equation needs
    /// disjoint closed curves.
    #[error("overlapping geometry: {0}")]
    Overlap(String),

    /// The configuration cannot be evaluated (overlap or constraint breach);
    /// consumed by the optimizer's penalty layer.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    /// GMRES did not reach the requested tolerance.
    #[error("gmres did not converge: residual {residual:.3e} after {iterations} iterations")]
    GmresNonConvergence { residual: f64, iterations: usize },

    /// The (m+1) x (m+1) capacity system is numerically singular.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
