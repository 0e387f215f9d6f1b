//! Exact supercommutative polynomial engine for Lie algebroid brackets,
//! graded Tulczyjew triples and higher derived brackets.

pub mod algebroid;
pub mod bracket_engine;
pub mod cartan_calculus;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod graded_algebra;
pub mod higher_structures;
pub mod report;
pub mod sampling;
pub mod tulczyjew;

pub use error::{Error, Result};
