//! Exact q-expansion toolkit for p-adic limits of Maass lifts of non-real Nebentypus.
//!
//! Everything is computed exactly in Q or Q(ζ_{p-1}); embeddings into Q_p are applied
//! once, at the end, to measure p-adic convergence.

pub mod arith;
pub mod characters;
pub mod cli;
pub mod eisenstein;
pub mod error;
pub mod lab;
pub mod lvalues;
pub mod maass;
pub mod qseries;

pub use error::{Error, Result};
