//! Crofton formulae for translation-invariant Minkowski surface tensors of
//! convex bodies, and line-section estimators built on them.

pub mod bodies;
pub mod crofton_coeffs;
pub mod estimators;
pub mod experiments;
pub mod error;
pub mod ground_truth;
pub mod linalg;
pub mod particle_process;
pub mod quadrature;
pub mod symtensor;

pub use error::{Error, Result};
