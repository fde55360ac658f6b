//! Exact computations around Tanaka symbols of rank 2 distributions: graded Lie algebras,
//! universal prolongations, cochain complexes, normalization conditions and polynomial
//! vector field frames.

pub mod catalog;
pub mod cohomo;
pub mod error;
pub mod exactla;
pub mod glie;
pub mod normcond;
pub mod prolong;
pub mod vf;

pub use error::{Error, Result};
pub use exactla::{Matrix, Rational, SparseVec};
pub use glie::{GradedLieAlgebra, SymbolAlgebra};
