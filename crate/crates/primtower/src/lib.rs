//! Exact computational algebra for truncated tensor bialgebras.
//!
//! The crate computes primitive-element spaces of (weighted) tensor
//! bialgebras over exact fields, checks Eilenberg-Moore algebra structure
//! on those primitives, builds the induced quotient bialgebra by an
//! explicit coequalizer ideal, and reconciles the result with classical
//! (restricted) Lie theory via PBW enveloping algebras. Everything is
//! degree-truncated and every claim carries its verification window.

pub mod cli;
pub mod error;
pub mod files;
pub mod lie;
pub mod linalg;
pub mod lyndon;
pub mod report;
pub mod scalar;
pub mod tensor;
pub mod tower;

pub use error::{Error, Result};
pub use scalar::{FieldSpec, Scalar};
