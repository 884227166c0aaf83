//! Composed relaxed-projection methods for the two-set convex feasibility
//! problem `find x ∈ X ∩ Y`.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense kernels (Gram/Cholesky solves, 2×2 eigenvalues, DCT).
//! - [`sets`]: projectable convex sets and relaxed reflections.
//! - [`operators`]: the composed fixed-point operators, the stationary
//!   generalized scheme and the MAP / DR / GRAP baselines, plus a generic
//!   driver that records residual histories.
//! - [`schedules`]: non-stationary parameter laws with summable increments.
//! - [`spectral`]: principal-angle block spectra, critical damping and
//!   minimax parameter selection for the two-subspace model.
//! - [`problems`]: seedable generators for the benchmark instances.

pub mod error;
pub mod linalg;
pub mod operators;
pub mod problems;
pub mod schedules;
pub mod sets;
pub mod spectral;

pub use error::{Error, Result};
pub use operators::{RunOptions, RunRecord, SolverParams, Stepper, Termination};
pub use sets::{ConvexSet, ReflectionParams};
