//! Parameter bundles, evaluators and dataset generation for the parametric models.

mod eval;
mod params;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Mask, Mode, Prob, Row, Scc, Universe};

pub use eval::{
    ar_row, eba_row, eval_ar_first_stage, eval_ar_item, eval_eba, eval_ic, eval_logit,
    eval_nested_logit, eval_nsc, eval_rcg, eval_rrm, ic_row, logit_row, nested_logit_row,
    nsc_row, rcg_row, rrm_row, ArItem,
};
pub use params::{
    ArAttribute, ArParams, Attribute, EbaParams, IcParams, LogitParams, NestedLogitParams,
    NscParams, RcgParams, RrmParams,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Logit,
    Rcg,
    Ic,
    Eba,
    Ar,
    Rrm,
    Nsc,
    NestedLogit,
}

impl ModelTag {
    pub const ALL: [ModelTag; 8] = [
        ModelTag::Logit,
        ModelTag::Rcg,
        ModelTag::Ic,
        ModelTag::Eba,
        ModelTag::Ar,
        ModelTag::Rrm,
        ModelTag::Nsc,
        ModelTag::NestedLogit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelTag::Logit => "logit",
            ModelTag::Rcg => "rcg",
            ModelTag::Ic => "ic",
            ModelTag::Eba => "eba",
            ModelTag::Ar => "ar",
            ModelTag::Rrm => "rrm",
            ModelTag::Nsc => "nsc",
            ModelTag::NestedLogit => "nested_logit",
        }
    }

    /// Whether the model has an empty-collection variant.
    pub fn has_empty_variant(self) -> bool {
        matches!(self, ModelTag::Logit | ModelTag::Rcg | ModelTag::Ic)
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelTag> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "nl" | "nested-logit" => return Ok(ModelTag::NestedLogit),
            _ => {}
        }
        ModelTag::ALL
            .into_iter()
            .find(|t| t.name() == lower)
            .ok_or_else(|| Error::Schema(format!("unknown model `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelParams {
    Logit(LogitParams),
    Rcg(RcgParams),
    Ic(IcParams),
    Eba(EbaParams),
    Ar(ArParams),
    Rrm(RrmParams),
    Nsc(NscParams),
    NestedLogit(NestedLogitParams),
}

impl ModelParams {
    pub fn tag(&self) -> ModelTag {
        match self {
            ModelParams::Logit(_) => ModelTag::Logit,
            ModelParams::Rcg(_) => ModelTag::Rcg,
            ModelParams::Ic(_) => ModelTag::Ic,
            ModelParams::Eba(_) => ModelTag::Eba,
            ModelParams::Ar(_) => ModelTag::Ar,
            ModelParams::Rrm(_) => ModelTag::Rrm,
            ModelParams::Nsc(_) => ModelTag::Nsc,
            ModelParams::NestedLogit(_) => ModelTag::NestedLogit,
        }
    }
}

/// A parameter bundle plus the empty-collection flag.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub params: ModelParams,
    pub empty_variant: bool,
}

impl ModelSpec {
    pub fn new(params: ModelParams, empty_variant: bool) -> Result<ModelSpec> {
        if empty_variant && !params.tag().has_empty_variant() {
            return Err(Error::InvalidParams(format!(
                "{} has no empty-collection variant",
                params.tag()
            )));
        }
        Ok(ModelSpec {
            params,
            empty_variant,
        })
    }

    pub fn standard(params: ModelParams) -> ModelSpec {
        ModelSpec {
            params,
            empty_variant: false,
        }
    }

    pub fn tag(&self) -> ModelTag {
        self.params.tag()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.empty_variant && !self.tag().has_empty_variant() {
            return Err(Error::InvalidParams(format!(
                "{} has no empty-collection variant",
                self.tag()
            )));
        }
        match &self.params {
            ModelParams::Logit(p) => p.validate(n, self.empty_variant),
            ModelParams::Rcg(p) => p.validate(n, self.empty_variant),
            ModelParams::Ic(p) => p.validate(n),
            ModelParams::Eba(p) => p.validate(n),
            ModelParams::Ar(p) => p.validate(n),
            ModelParams::Rrm(p) => p.validate(n),
            ModelParams::Nsc(p) => p.validate(n),
            ModelParams::NestedLogit(p) => p.validate(n),
        }
    }

    /// Arithmetic mode of generated values.
    pub fn mode(&self) -> Mode {
        match &self.params {
            ModelParams::Logit(p) => p.mode(),
            ModelParams::Rcg(p) => p.mode(),
            ModelParams::Ic(p) => p.mode(),
            ModelParams::Eba(p) => p.mode(),
            ModelParams::Ar(p) => p.mode(),
            ModelParams::Rrm(p) => p.mode(),
            ModelParams::Nsc(p) => p.mode(),
            ModelParams::NestedLogit(p) => p.mode(),
        }
    }

    /// The full distribution at menu `s`, zero entries omitted.
    pub fn row(&self, s: Mask) -> Result<Row> {
        let ev = self.empty_variant;
        match &self.params {
            ModelParams::Logit(p) => logit_row(p, s, ev),
            ModelParams::Rcg(p) => rcg_row(p, s, ev),
            ModelParams::Ic(p) => ic_row(p, s, ev),
            ModelParams::Eba(p) => eba_row(p, s),
            ModelParams::Ar(p) => ar_row(p, s),
            ModelParams::Rrm(p) => rrm_row(p, s),
            ModelParams::Nsc(p) => nsc_row(p, s),
            ModelParams::NestedLogit(p) => nested_logit_row(p, s),
        }
    }

    pub fn eval(&self, t: Mask, s: Mask) -> Result<Prob> {
        let ev = self.empty_variant;
        match &self.params {
            ModelParams::Logit(p) => eval_logit(p, t, s, ev),
            ModelParams::Rcg(p) => eval_rcg(p, t, s, ev),
            ModelParams::Ic(p) => eval_ic(p, t, s, ev),
            ModelParams::Eba(p) => eval_eba(p, t, s),
            ModelParams::Ar(p) => eval_ar_first_stage(p, t, s),
            ModelParams::Rrm(p) => eval_rrm(p, t, s),
            ModelParams::Nsc(p) => eval_nsc(p, t, s),
            ModelParams::NestedLogit(p) => eval_nested_logit(p, t, s),
        }
    }
}

/// The complete dataset a model produces on `universe`. Menus are evaluated in
/// parallel and merged in canonical order.
pub fn generate_scc(spec: &ModelSpec, universe: &Universe) -> Result<Scc> {
    spec.validate(universe.len())?;
    let menus: Vec<Mask> = universe.menus().collect();
    let rows: Vec<(Mask, Row)> = menus
        .par_iter()
        .map(|&s| spec.row(s).map(|r| (s, r)))
        .collect::<Result<_>>()?;
    let rows: BTreeMap<Mask, Row> = rows.into_iter().collect();
    Scc::new(universe.clone(), spec.empty_variant, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::ToleranceConfig;

    #[test]
    fn uniform_ic_generates_uniform_rows() {
        let u = Universe::letters(3).unwrap();
        let spec = ModelSpec::standard(ModelParams::Ic(IcParams {
            gamma: vec![Prob::ratio(1, 2); 3],
        }));
        let scc = generate_scc(&spec, &u).unwrap();
        assert!(scc.validate(&ToleranceConfig::default()).is_empty());
        for (s, row) in scc.rows() {
            let expect = Prob::ratio(1, (1 << s.len()) - 1);
            assert_eq!(row.len(), (1 << s.len()) - 1);
            assert!(row.values().all(|p| *p == expect));
        }
    }

    #[test]
    fn nsc_rows_have_one_entry_per_live_nest() {
        let u = Universe::letters(3).unwrap();
        let nsc = NscParams {
            nests: vec![Mask(0b011), Mask(0b100)],
            sigma: [
                (Mask(0b001), Prob::int(1)),
                (Mask(0b010), Prob::int(2)),
                (Mask(0b011), Prob::int(4)),
                (Mask(0b100), Prob::int(3)),
            ]
            .into(),
        };
        let scc = generate_scc(&ModelSpec::standard(ModelParams::Nsc(nsc)), &u).unwrap();
        for (s, row) in scc.rows() {
            let live = [Mask(0b011), Mask(0b100)]
                .iter()
                .filter(|n| !n.intersection(*s).is_empty())
                .count();
            assert_eq!(row.len(), live);
        }
    }

    #[test]
    fn variant_flag_only_for_three_models() {
        let rrm = ModelParams::Rrm(RrmParams {
            salience: vec![Prob::int(1)],
            constraints: vec![Mask(1)],
        });
        assert!(ModelSpec::new(rrm, true).is_err());
    }

    #[test]
    fn tags_parse() {
        assert_eq!("nl".parse::<ModelTag>().unwrap(), ModelTag::NestedLogit);
        assert_eq!("RRM".parse::<ModelTag>().unwrap(), ModelTag::Rrm);
        assert!("probit".parse::<ModelTag>().is_err());
    }
}
