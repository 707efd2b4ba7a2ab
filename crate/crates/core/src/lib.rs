//! Integer matrix actions on tori: exact virtual-nilpotence and Berend-condition
//! checks, orbit experiments, and diophantine witnesses for the resulting
//! strong-quasidiagonality verdicts of `Z^d ⋊ Z^n`.

pub mod berend;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod diophantine;
pub mod error;
pub mod matrix;
pub mod number_field;
pub mod numeric;
pub mod polynomials;
pub mod random;
pub mod reproduce;
mod serde_util;
pub mod snf;
pub mod spec;
pub mod torus;
pub mod witness;

pub use error::{Error, Result};
pub use matrix::IntMatrix;
pub use polynomials::{IntPoly, MonicIntPoly};
pub use snf::{smith_normal_form, SmithDecomposition};
pub use spec::{validate_spec, ActionSpec};
