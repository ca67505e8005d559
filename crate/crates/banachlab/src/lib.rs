//! A desk-scale numerical laboratory for Banach-space operator theory.
//!
//! The crate computes summing norms, injective/projective tensor norms, and
//! Hilbert-space factorization norms on finite-dimensional truncations, and
//! reconstructs four classical counterexample operators as quantitative
//! experiments with machine-checkable certificates.
//!
//! Layout:
//! - [`spaces`]: sequence spaces ℓ_p^n and grid-discretized function spaces
//!   on [0,1] with exact piecewise-linear calculus.
//! - [`operators`]: dense operators with exact or certified operator norms.
//! - [`summing`]: (p,q)-summing estimates, Pietsch π₂ certificates, γ₂.
//! - [`tensor`]: ε/π/Z tensor norms and the T ↦ T^# slice correspondence.
//! - [`experiments`]: the four counterexample reconstructions as reports.
//! - [`report`]: deterministic JSON/CSV/SVG emission.

pub mod error;
pub mod experiments;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod spaces;
pub mod summing;
pub mod tensor;

pub use error::{Error, Result};
