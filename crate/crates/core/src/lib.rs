//! Bounded-occurrence weighted Max Ones over boolean constraint languages:
//! relations, co-clone location, Δ-matroid structure, gadgets, solvers and
//! the classification procedures built on them.

pub mod classify;
pub mod clone;
pub mod delta;
pub mod error;
pub mod gadget;
pub mod relation;
pub mod solver;

pub use error::{Error, Result};
