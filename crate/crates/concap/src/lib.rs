//! Conformal capacity of condensers `(B^2, E)` where `E` is a constellation of
//! disjoint hyperbolic disks in the unit disk.
//!
//! The capacity is computed with a boundary integral equation built on the
//! generalized Neumann kernel, discretized by the Nystrom method with the
//! trapezoidal rule and solved with GMRES. On top of the solver sits a
//! constrained maximizer (log-barrier interior method with BFGS inner
//! iterations) that searches for disk positions of maximal capacity under
//! center-containment constraints.

pub mod bie;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod optim;
pub mod specialfn;

pub use error::Error;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
