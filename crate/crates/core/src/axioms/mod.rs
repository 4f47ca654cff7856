//! Decision procedures for the behavioral postulates. Every check enumerates
//! its quantifier exhaustively in a fixed order and reports concrete witnesses.

mod additive;
mod ctx;
pub mod derived;
mod ratio;
mod recheck;
mod support;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Mask, Mode, Prob, Scc, ToleranceConfig};

pub use recheck::recheck;
pub use support::{derive_revealed_constraints, derive_revealed_nests};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AxiomId {
    #[serde(rename = "IIS")]
    Iis,
    #[serde(rename = "IIS_O")]
    IisO,
    #[serde(rename = "REL_ADD")]
    RelAdd,
    #[serde(rename = "ADDITIVITY")]
    Additivity,
    #[serde(rename = "POS1")]
    Pos1,
    #[serde(rename = "POS2")]
    Pos2,
    #[serde(rename = "DISTINCT_Q")]
    DistinctQ,
    #[serde(rename = "POS3")]
    Pos3,
    #[serde(rename = "REL_ADD_1")]
    RelAdd1,
    #[serde(rename = "REL_ADD_2")]
    RelAdd2,
    #[serde(rename = "PIIS")]
    Piis,
    #[serde(rename = "PARTITION")]
    Partition,
    #[serde(rename = "POS4")]
    Pos4,
    #[serde(rename = "PAF")]
    Paf,
    #[serde(rename = "FULL_SUPPORT")]
    FullSupport,
    #[serde(rename = "DET_FULL_CHOICE")]
    DetFullChoice,
    #[serde(rename = "SINGLETON")]
    Singleton,
}

impl AxiomId {
    pub const ALL: [AxiomId; 17] = [
        AxiomId::Iis,
        AxiomId::IisO,
        AxiomId::RelAdd,
        AxiomId::Additivity,
        AxiomId::Pos1,
        AxiomId::Pos2,
        AxiomId::DistinctQ,
        AxiomId::Pos3,
        AxiomId::RelAdd1,
        AxiomId::RelAdd2,
        AxiomId::Piis,
        AxiomId::Partition,
        AxiomId::Pos4,
        AxiomId::Paf,
        AxiomId::FullSupport,
        AxiomId::DetFullChoice,
        AxiomId::Singleton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Iis => "IIS",
            AxiomId::IisO => "IIS_O",
            AxiomId::RelAdd => "REL_ADD",
            AxiomId::Additivity => "ADDITIVITY",
            AxiomId::Pos1 => "POS1",
            AxiomId::Pos2 => "POS2",
            AxiomId::DistinctQ => "DISTINCT_Q",
            AxiomId::Pos3 => "POS3",
            AxiomId::RelAdd1 => "REL_ADD_1",
            AxiomId::RelAdd2 => "REL_ADD_2",
            AxiomId::Piis => "PIIS",
            AxiomId::Partition => "PARTITION",
            AxiomId::Pos4 => "POS4",
            AxiomId::Paf => "PAF",
            AxiomId::FullSupport => "FULL_SUPPORT",
            AxiomId::DetFullChoice => "DET_FULL_CHOICE",
            AxiomId::Singleton => "SINGLETON",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<AxiomId> {
        let upper = s.trim().to_ascii_uppercase().replace('-', "_");
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == upper)
            .ok_or_else(|| Error::Schema(format!("unknown axiom `{s}`")))
    }
}

/// A named quantifier instance inside a witness.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Set(Mask),
    Item(usize),
}

/// One side of the violated relation.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Value(Prob),
    Set(Mask),
}

/// The relation the axiom demands between `lhs` and `rhs`; a witness is an
/// instance where it fails.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// lhs = rhs
    Eq,
    /// lhs ≠ rhs
    Ne,
    /// lhs > rhs
    Gt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub axiom: AxiomId,
    pub bindings: Vec<(&'static str, Binding)>,
    pub relation: Relation,
    pub lhs: Quantity,
    pub rhs: Quantity,
}

impl Witness {
    pub fn set(&self, name: &str) -> Option<Mask> {
        self.bindings.iter().find_map(|(k, b)| match b {
            Binding::Set(m) if *k == name => Some(*m),
            _ => None,
        })
    }

    pub fn item(&self, name: &str) -> Option<usize> {
        self.bindings.iter().find_map(|(k, b)| match b {
            Binding::Item(i) if *k == name => Some(*i),
            _ => None,
        })
    }

    pub fn lhs_value(&self) -> Option<&Prob> {
        match &self.lhs {
            Quantity::Value(p) => Some(p),
            Quantity::Set(_) => None,
        }
    }

    pub fn rhs_value(&self) -> Option<&Prob> {
        match &self.rhs {
            Quantity::Value(p) => Some(p),
            Quantity::Set(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub holds: bool,
    /// First `witness_cap` violations in enumeration order.
    pub witnesses: Vec<Witness>,
    /// Total number of violating instances, including those past the cap.
    pub violations: usize,
    pub instances_checked: u64,
    pub instances_vacuous: u64,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: ToleranceConfig,
    pub witness_cap: usize,
    /// Exogenous attribute carriers, needed by POS2.
    pub attributes: Option<Vec<Mask>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: ToleranceConfig::default(),
            witness_cap: 10,
            attributes: None,
        }
    }
}

impl CheckOptions {
    pub fn with_tol(tol: ToleranceConfig) -> Self {
        CheckOptions {
            tol,
            ..CheckOptions::default()
        }
    }

    pub fn with_attributes(mut self, attributes: Vec<Mask>) -> Self {
        self.attributes = Some(attributes);
        self
    }
}

/// The battery `check --axioms all` runs on this dataset.
pub fn applicable_axioms(scc: &Scc, opts: &CheckOptions) -> Vec<AxiomId> {
    if scc.allows_empty() {
        return vec![AxiomId::IisO, AxiomId::Additivity, AxiomId::FullSupport];
    }
    AxiomId::ALL
        .into_iter()
        .filter(|a| match a {
            AxiomId::IisO | AxiomId::Additivity => false,
            AxiomId::Pos2 => opts.attributes.is_some(),
            _ => true,
        })
        .collect()
}

/// Decides one axiom on a complete dataset.
pub fn check(scc: &Scc, axiom: AxiomId, opts: &CheckOptions) -> Result<AxiomReport> {
    opts.tol.validate()?;
    if opts.witness_cap == 0 {
        return Err(Error::InvalidParams("witness cap must be at least 1".into()));
    }
    let ctx = ctx::Ctx::new(scc, opts)?;
    match axiom {
        AxiomId::Iis => Ok(ratio::iis(&ctx, false)),
        AxiomId::IisO => {
            require_variant(scc, axiom, true)?;
            Ok(ratio::iis(&ctx, true))
        }
        AxiomId::RelAdd => Ok(additive::rel_add(&ctx)),
        AxiomId::Additivity => {
            require_variant(scc, axiom, true)?;
            Ok(additive::additivity(&ctx))
        }
        AxiomId::Pos1 => Ok(support::pos1(&ctx)),
        AxiomId::Pos2 => {
            let attrs = opts
                .attributes
                .as_ref()
                .ok_or(Error::MissingAttributes(axiom))?;
            for a in attrs {
                scc.universe().check_mask(*a)?;
            }
            Ok(support::pos_structured(&ctx, AxiomId::Pos2, attrs))
        }
        AxiomId::DistinctQ => support::distinct_q(&ctx),
        AxiomId::Pos3 => {
            let q = derive_revealed_constraints(scc, &opts.tol)?;
            Ok(support::pos3(&ctx, &q))
        }
        AxiomId::RelAdd1 => {
            let q = derive_revealed_constraints(scc, &opts.tol)?;
            Ok(additive::rel_add_1(&ctx, &q))
        }
        AxiomId::RelAdd2 => {
            let q = derive_revealed_constraints(scc, &opts.tol)?;
            Ok(additive::rel_add_2(&ctx, &q))
        }
        AxiomId::Piis => Ok(ratio::piis(&ctx)),
        AxiomId::Partition => support::partition(&ctx),
        AxiomId::Pos4 => {
            let nests = derive_revealed_nests(scc, &opts.tol)?;
            Ok(support::pos_structured(&ctx, AxiomId::Pos4, &nests))
        }
        AxiomId::Paf => Ok(support::paf(&ctx)),
        AxiomId::FullSupport => Ok(support::full_support(&ctx)),
        AxiomId::DetFullChoice => Ok(support::det_full_choice(&ctx)),
        AxiomId::Singleton => Ok(ratio::singleton(&ctx)),
    }
}

fn require_variant(scc: &Scc, axiom: AxiomId, expected: bool) -> Result<()> {
    if scc.allows_empty() != expected {
        return Err(Error::WrongVariant { axiom, expected });
    }
    Ok(())
}

/// Runs several checks concurrently; reports come back in the order requested.
pub fn check_many(scc: &Scc, axioms: &[AxiomId], opts: &CheckOptions) -> Result<Vec<AxiomReport>> {
    scc.require_complete()?;
    axioms.par_iter().map(|a| check(scc, *a, opts)).collect()
}

pub fn check_iis(scc: &Scc, opts: &CheckOptions, empty_variant: bool) -> Result<AxiomReport> {
    check(scc, if empty_variant { AxiomId::IisO } else { AxiomId::Iis }, opts)
}

pub fn check_relative_additivity(scc: &Scc, opts: &CheckOptions) -> Result<AxiomReport> {
    check(scc, AxiomId::RelAdd, opts)
}

pub fn check_additivity(scc: &Scc, opts: &CheckOptions) -> Result<AxiomReport> {
    check(scc, AxiomId::Additivity, opts)
}

/// POS1 to POS4 by number.
pub fn check_positivity(scc: &Scc, kind: u8, opts: &CheckOptions) -> Result<AxiomReport> {
    let axiom = match kind {
        1 => AxiomId::Pos1,
        2 => AxiomId::Pos2,
        3 => AxiomId::Pos3,
        4 => AxiomId::Pos4,
        _ => return Err(Error::InvalidParams(format!("no positivity axiom {kind}"))),
    };
    check(scc, axiom, opts)
}

/// DISTINCT_Q, POS3, REL_ADD_1, REL_ADD_2.
pub fn check_rrm_suite(scc: &Scc, opts: &CheckOptions) -> Result<Vec<AxiomReport>> {
    check_many(
        scc,
        &[AxiomId::DistinctQ, AxiomId::Pos3, AxiomId::RelAdd1, AxiomId::RelAdd2],
        opts,
    )
}

pub fn check_piis(scc: &Scc, opts: &CheckOptions) -> Result<AxiomReport> {
    check(scc, AxiomId::Piis, opts)
}

/// PIIS, PARTITION, POS4.
pub fn check_nsc_structure(scc: &Scc, opts: &CheckOptions) -> Result<Vec<AxiomReport>> {
    check_many(scc, &[AxiomId::Piis, AxiomId::Partition, AxiomId::Pos4], opts)
}

pub fn check_paf(scc: &Scc, opts: &CheckOptions) -> Result<AxiomReport> {
    check(scc, AxiomId::Paf, opts)
}

/// DET_FULL_CHOICE or SINGLETON.
pub fn check_special(scc: &Scc, kind: AxiomId, opts: &CheckOptions) -> Result<AxiomReport> {
    match kind {
        AxiomId::DetFullChoice | AxiomId::Singleton => check(scc, kind, opts),
        other => Err(Error::InvalidParams(format!("{other} is not a special structure"))),
    }
}
