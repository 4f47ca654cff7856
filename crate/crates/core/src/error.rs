use thiserror::Error;

use crate::axioms::{AxiomId, AxiomReport};
use crate::primitives::Mask;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid universe: {0}")]
    Universe(String),

    #[error("unknown item label `{0}`")]
    UnknownLabel(String),

    #[error("mask {mask:#b} has bits outside a universe of {n} items")]
    MaskOutOfRange { mask: u32, n: usize },

    #[error("menu {0:?} is not in the dataset")]
    MenuAbsent(Mask),

    #[error("shape error: collection {collection:?} is not a subset of menu {menu:?}")]
    Shape { collection: Mask, menu: Mask },

    #[error("the empty collection is not admissible here")]
    EmptyCollection,

    #[error("dataset is incomplete: menu {0:?} is missing")]
    Incomplete(Mask),

    #[error("binary menu {{{0}, {1}}} is missing")]
    MissingBinaryMenu(String, String),

    #[error("the grand-set menu is missing")]
    MissingGrandSet,

    #[error("missing weight for collection {0:?}")]
    MissingWeight(Mask),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("axiom {axiom} needs a dataset with allows_empty = {expected}")]
    WrongVariant { axiom: AxiomId, expected: bool },

    #[error("axiom {0} needs exogenous attributes")]
    MissingAttributes(AxiomId),

    #[error("precondition failed: {} does not hold", .0.axiom)]
    PreconditionFailed(Box<AxiomReport>),

    #[error("recovered parameters do not reproduce the dataset")]
    RoundTripFailed,

    #[error("cannot sample parameters: {0}")]
    InfeasibleStructure(String),

    #[error("invalid probability literal `{0}`")]
    ProbLiteral(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("dataset fails validation: {0}")]
    Validation(String),

    #[error("menu {0:?} has zero total count")]
    ZeroTotal(Mask),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
