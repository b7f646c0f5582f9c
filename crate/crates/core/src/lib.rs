//! Exact analysis of expansive observables on finitely presented dynamical
//! systems.

pub mod algebra;
pub mod circle;
pub mod corpus;
pub mod error;
pub mod examples;
pub mod plot;
pub mod relation;
pub mod report;
pub mod scalar;
pub mod symbolic;
pub mod system;
pub mod union_find;

pub use error::{CircleError, ModelError, ShiftError};
pub use scalar::{ExactScalar, Extended, GaussianRational};
pub use system::{FiniteSystem, Observable};
