//! Desk-scale workbench for hypergraph Turán problems with rational exponents.

pub mod algebraic;
pub mod entropy;
pub mod error;
pub mod field;
pub mod harness;
pub mod hypergraph;
pub mod lifting;
pub mod seed;
pub mod tree;

pub use error::{Error, Result};
