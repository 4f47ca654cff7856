//! Universes, subset masks, probabilities and the correspondence dataset.

mod mask;
mod prob;
mod scc;
mod universe;

pub use mask::{Items, Mask, Subsets};
pub use prob::{literal_kind, LiteralKind, Mode, Prob, ToleranceConfig};
pub use scc::{Property, Row, Scc, Violation};
pub(crate) use scc::Table;
pub use universe::{Universe, EXHAUSTIVE_WARN_ITEMS, MAX_ITEMS};
