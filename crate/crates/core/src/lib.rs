//! Exact-arithmetic toolkit for stochastic choice correspondences: datasets that
//! give, for each menu, a probability distribution over the collections of items
//! that may be chosen from it.
//!
//! The crate evaluates parametric models of such datasets, decides their
//! characterizing axioms with counterexample witnesses, recovers parameters from
//! data and places a dataset among the model classes.

pub mod axioms;
pub mod classify;
pub mod error;
pub mod fuzz;
pub mod identify;
pub mod io;
pub mod models;
pub mod primitives;

pub use error::{Error, Result};
pub use primitives::{Mask, Mode, Prob, Scc, ToleranceConfig, Universe};
