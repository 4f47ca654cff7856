use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::primitives::{Mask, Mode, Prob};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn require_positive(p: &Prob, what: impl FnOnce() -> String) -> Result<()> {
    if p.is_negative() || p.is_exact_zero() {
        return Err(invalid(format!("{} must be positive, got {p}", what())));
    }
    Ok(())
}

/// Sum must equal one exactly (exact mode) or to within 1e-9.
fn require_unit_sum<'a>(values: impl Iterator<Item = &'a Prob>, what: &str) -> Result<()> {
    let total: Prob = values.sum();
    let ok = match &total {
        Prob::Exact(r) => r.is_one(),
        Prob::Float(v) => (v - 1.0).abs() <= 1e-9,
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("{what} sums to {total}, expected 1")))
    }
}

fn require_cover(n: usize, sets: impl Iterator<Item = Mask>, what: &str) -> Result<()> {
    let covered = sets.fold(Mask::EMPTY, Mask::union);
    let full = Mask::full(n);
    if covered != full {
        let missing = full.difference(covered).first().unwrap_or(0);
        return Err(invalid(format!("item {missing} belongs to no {what}")));
    }
    Ok(())
}

fn require_partition(n: usize, nests: &[Mask]) -> Result<()> {
    let mut seen = Mask::EMPTY;
    for nest in nests {
        if nest.is_empty() {
            return Err(invalid("nests must be non-empty"));
        }
        if !nest.is_subset_of(Mask::full(n)) {
            return Err(invalid("nest mentions an item outside the universe"));
        }
        if !seen.intersection(*nest).is_empty() {
            return Err(invalid("nests overlap"));
        }
        seen = seen.union(*nest);
    }
    if seen != Mask::full(n) {
        return Err(invalid("nests do not cover the grand set"));
    }
    Ok(())
}

fn values_mode<'a>(values: impl Iterator<Item = &'a Prob>) -> Mode {
    values.fold(Mode::Exact, |m, p| m.combine(p.mode()))
}

/// Collection weights π, one per non-empty collection of the grand set.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitParams {
    pub pi: BTreeMap<Mask, Prob>,
    /// π(∅), consulted only by the empty-collection variant.
    pub pi_empty: Option<Prob>,
}

impl LogitParams {
    pub fn validate(&self, n: usize, empty_variant: bool) -> Result<()> {
        for t in Mask::full(n).nonempty_subsets() {
            let w = self.pi.get(&t).ok_or(Error::MissingWeight(t))?;
            require_positive(w, || format!("π({t:?})"))?;
        }
        if self.pi.keys().any(|t| t.is_empty() || !t.is_subset_of(Mask::full(n))) {
            return Err(invalid("π keys must be non-empty subsets of the grand set"));
        }
        if empty_variant {
            let w = self.pi_empty.as_ref().ok_or(Error::MissingWeight(Mask::EMPTY))?;
            require_positive(w, || "π(∅)".into())?;
        }
        Ok(())
    }

    pub fn weight(&self, t: Mask) -> Result<&Prob> {
        if t.is_empty() {
            self.pi_empty.as_ref().ok_or(Error::MissingWeight(t))
        } else {
            self.pi.get(&t).ok_or(Error::MissingWeight(t))
        }
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.pi.values().chain(self.pi_empty.iter()))
    }
}

/// Category distribution m. The empty category is meaningful only for the
/// empty-collection variant.
#[derive(Clone, Debug, PartialEq)]
pub struct RcgParams {
    pub m: BTreeMap<Mask, Prob>,
}

impl RcgParams {
    pub fn validate(&self, n: usize, empty_variant: bool) -> Result<()> {
        for (c, w) in &self.m {
            if !c.is_subset_of(Mask::full(n)) {
                return Err(invalid("category outside the grand set"));
            }
            if c.is_empty() && !empty_variant {
                return Err(invalid("the empty category needs the empty-collection variant"));
            }
            if w.is_negative() {
                return Err(invalid(format!("m({c:?}) is negative")));
            }
        }
        require_unit_sum(self.m.values(), "m")?;
        if !empty_variant {
            require_cover(
                n,
                self.m.iter().filter(|(_, w)| !w.is_exact_zero()).map(|(c, _)| *c),
                "category with positive mass",
            )?;
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.m.values())
    }
}

/// Independent inclusion probabilities γ, indexed by item.
#[derive(Clone, Debug, PartialEq)]
pub struct IcParams {
    pub gamma: Vec<Prob>,
}

impl IcParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.gamma.len() != n {
            return Err(invalid(format!("expected {n} γ values, got {}", self.gamma.len())));
        }
        let one = Prob::one(Mode::Exact);
        for (x, g) in self.gamma.iter().enumerate() {
            if g.is_negative() || g.is_exact_zero() || !g.cmp_value(&one).is_lt() {
                return Err(invalid(format!("γ({x}) = {g} is not in (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.gamma.iter())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Attribute {
    pub weight: Prob,
    pub carrier: Mask,
}

/// Static elimination by aspects: attention weights ω_i on attribute carriers A_i.
#[derive(Clone, Debug, PartialEq)]
pub struct EbaParams {
    pub attributes: Vec<Attribute>,
}

impl EbaParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(invalid("at least one attribute is required"));
        }
        for (i, a) in self.attributes.iter().enumerate() {
            require_positive(&a.weight, || format!("ω_{i}"))?;
            if a.carrier.is_empty() || !a.carrier.is_subset_of(Mask::full(n)) {
                return Err(invalid(format!("attribute {i} has an invalid carrier")));
            }
        }
        require_unit_sum(self.attributes.iter().map(|a| &a.weight), "ω")?;
        require_cover(n, self.attributes.iter().map(|a| a.carrier), "attribute")
    }

    /// The category distribution with m(C) = Σ_{i: A_i = C} ω_i.
    pub fn to_rcg(&self) -> RcgParams {
        let mut m: BTreeMap<Mask, Prob> = BTreeMap::new();
        for a in &self.attributes {
            let slot = m.entry(a.carrier).or_insert_with(|| Prob::zero(a.weight.mode()));
            *slot = &*slot + &a.weight;
        }
        RcgParams { m }
    }

    pub fn carriers(&self) -> Vec<Mask> {
        self.attributes.iter().map(|a| a.carrier).collect()
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.attributes.iter().map(|a| &a.weight))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArAttribute {
    pub theta: Prob,
    pub carrier: Mask,
    /// η^i_x for x in the carrier; zero elsewhere.
    pub eta: BTreeMap<usize, u64>,
}

/// Attribute rule: attribute weights θ_i with carriers B_i and item values η^i.
#[derive(Clone, Debug, PartialEq)]
pub struct ArParams {
    pub attributes: Vec<ArAttribute>,
}

impl ArParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(invalid("at least one attribute is required"));
        }
        for (i, a) in self.attributes.iter().enumerate() {
            require_positive(&a.theta, || format!("θ_{i}"))?;
            if a.carrier.is_empty() || !a.carrier.is_subset_of(Mask::full(n)) {
                return Err(invalid(format!("attribute {i} has an invalid carrier")));
            }
            let keys = Mask::from_items(a.eta.keys().copied());
            if keys != a.carrier {
                return Err(invalid(format!(
                    "η of attribute {i} must be defined exactly on its carrier"
                )));
            }
            if a.eta.values().any(|v| *v == 0) {
                return Err(invalid(format!("η of attribute {i} must be positive")));
            }
        }
        require_cover(n, self.attributes.iter().map(|a| a.carrier), "attribute")
    }

    pub fn eta(&self, attribute: usize, item: usize) -> u64 {
        self.attributes[attribute].eta.get(&item).copied().unwrap_or(0)
    }

    /// The static EBA bundle with ω_i = θ_i / Σθ and A_i = B_i.
    pub fn to_eba(&self) -> EbaParams {
        let total: Prob = self.attributes.iter().map(|a| &a.theta).sum();
        EbaParams {
            attributes: self
                .attributes
                .iter()
                .map(|a| Attribute {
                    weight: &a.theta / &total,
                    carrier: a.carrier,
                })
                .collect(),
        }
    }

    pub fn carriers(&self) -> Vec<Mask> {
        self.attributes.iter().map(|a| a.carrier).collect()
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.attributes.iter().map(|a| &a.theta))
    }
}

/// Random reference model: saliences s_x and constraint sets Q(x).
#[derive(Clone, Debug, PartialEq)]
pub struct RrmParams {
    pub salience: Vec<Prob>,
    pub constraints: Vec<Mask>,
}

impl RrmParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.salience.len() != n || self.constraints.len() != n {
            return Err(invalid(format!("expected {n} saliences and constraint sets")));
        }
        for (x, s) in self.salience.iter().enumerate() {
            require_positive(s, || format!("s_{x}"))?;
        }
        for (x, q) in self.constraints.iter().enumerate() {
            if !q.contains(x) {
                return Err(invalid(format!("item {x} is not in its own constraint set")));
            }
            if !q.is_subset_of(Mask::full(n)) {
                return Err(invalid("constraint set outside the grand set"));
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                if self.constraints[x] == self.constraints[y] {
                    return Err(invalid(format!(
                        "items {x} and {y} share a constraint set"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.salience.iter())
    }
}

/// Nested stochastic choice: a partition into nests and collection weights σ.
#[derive(Clone, Debug, PartialEq)]
pub struct NscParams {
    pub nests: Vec<Mask>,
    pub sigma: BTreeMap<Mask, Prob>,
}

impl NscParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        require_partition(n, &self.nests)?;
        for (t, w) in &self.sigma {
            if t.is_empty() {
                return Err(invalid("σ(∅) is fixed at zero and must not be given"));
            }
            require_positive(w, || format!("σ({t:?})"))?;
        }
        Ok(())
    }

    pub fn weight(&self, t: Mask) -> Result<Prob> {
        if t.is_empty() {
            return Ok(Prob::zero(Mode::Exact));
        }
        self.sigma.get(&t).cloned().ok_or(Error::MissingWeight(t))
    }

    pub fn mode(&self) -> Mode {
        values_mode(self.sigma.values())
    }
}

/// Nested logit: nests, item utilities v and nest exponents η.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedLogitParams {
    pub nests: Vec<Mask>,
    pub utility: Vec<Prob>,
    pub exponents: Vec<Prob>,
}

impl NestedLogitParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        require_partition(n, &self.nests)?;
        if self.utility.len() != n {
            return Err(invalid(format!("expected {n} utilities")));
        }
        if self.exponents.len() != self.nests.len() {
            return Err(invalid("one exponent per nest is required"));
        }
        for (x, v) in self.utility.iter().enumerate() {
            require_positive(v, || format!("v({x})"))?;
        }
        for (i, e) in self.exponents.iter().enumerate() {
            require_positive(e, || format!("η_{i}"))?;
        }
        Ok(())
    }

    fn integer_exponent(e: &Prob) -> Option<i32> {
        match e {
            Prob::Exact(r) if r.is_integer() => {
                let v: i64 = r.to_integer().try_into().ok()?;
                i32::try_from(v).ok()
            }
            _ => None,
        }
    }

    /// Exact unless an exponent is non-integer or a utility is a float.
    pub fn mode(&self) -> Mode {
        let base = values_mode(self.utility.iter());
        if self.exponents.iter().all(|e| Self::integer_exponent(e).is_some()) {
            base
        } else {
            Mode::Float
        }
    }

    pub fn nest_of(&self, t: Mask) -> Option<usize> {
        self.nests.iter().position(|n| !t.is_empty() && t.is_subset_of(*n))
    }

    /// σ(T) = (Σ_{x∈T} v(x))^{η_i} for non-empty T inside nest i.
    pub fn sigma(&self, t: Mask) -> Result<Prob> {
        if t.is_empty() {
            return Ok(Prob::zero(Mode::Exact));
        }
        let i = self.nest_of(t).ok_or(Error::MissingWeight(t))?;
        let base: Prob = t.items().map(|x| &self.utility[x]).sum();
        let e = &self.exponents[i];
        Ok(match Self::integer_exponent(e) {
            Some(k) => base.powi(k),
            None => base.powf(e.to_f64()),
        })
    }

    /// The NSC bundle carrying the induced σ on every non-empty subset of each nest.
    pub fn to_nsc(&self) -> Result<NscParams> {
        let mut sigma = BTreeMap::new();
        for nest in &self.nests {
            for t in nest.nonempty_subsets() {
                sigma.insert(t, self.sigma(t)?);
            }
        }
        Ok(NscParams {
            nests: self.nests.clone(),
            sigma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rcg_coverage_and_sum() {
        let ok = RcgParams {
            m: [(Mask(0b011), Prob::ratio(1, 2)), (Mask(0b100), Prob::ratio(1, 2))].into(),
        };
        assert!(ok.validate(3, false).is_ok());
        let uncovered = RcgParams {
            m: [(Mask(0b011), Prob::int(1))].into(),
        };
        assert!(uncovered.validate(3, false).is_err());
        assert!(uncovered.validate(3, true).is_ok());
        let short = RcgParams {
            m: [(Mask(0b111), Prob::ratio(1, 2))].into(),
        };
        assert!(short.validate(3, false).is_err());
    }

    #[test]
    fn rrm_requires_distinct_self_containing_sets() {
        let s = vec![Prob::int(1), Prob::int(1)];
        let good = RrmParams {
            salience: s.clone(),
            constraints: vec![Mask(0b11), Mask(0b10)],
        };
        assert!(good.validate(2).is_ok());
        let same = RrmParams {
            salience: s.clone(),
            constraints: vec![Mask(0b11), Mask(0b11)],
        };
        assert!(same.validate(2).is_err());
        let not_self = RrmParams {
            salience: s,
            constraints: vec![Mask(0b10), Mask(0b11)],
        };
        assert!(not_self.validate(2).is_err());
    }

    #[test]
    fn nsc_requires_partition() {
        let overlap = NscParams {
            nests: vec![Mask(0b011), Mask(0b110)],
            sigma: BTreeMap::new(),
        };
        assert!(overlap.validate(3).is_err());
        let gap = NscParams {
            nests: vec![Mask(0b011)],
            sigma: BTreeMap::new(),
        };
        assert!(gap.validate(3).is_err());
    }

    #[test]
    fn ic_gamma_open_interval() {
        assert!(IcParams { gamma: vec![Prob::ratio(1, 2)] }.validate(1).is_ok());
        assert!(IcParams { gamma: vec![Prob::int(1)] }.validate(1).is_err());
        assert!(IcParams { gamma: vec![Prob::int(0)] }.validate(1).is_err());
    }

    #[test]
    fn ar_eta_must_match_carrier() {
        let bad = ArParams {
            attributes: vec![ArAttribute {
                theta: Prob::int(1),
                carrier: Mask(0b11),
                eta: [(0, 1)].into(),
            }],
        };
        assert!(bad.validate(2).is_err());
    }

    #[test]
    fn nested_logit_mode_follows_exponents() {
        let mut p = NestedLogitParams {
            nests: vec![Mask(0b11)],
            utility: vec![Prob::int(1), Prob::int(1)],
            exponents: vec![Prob::int(2)],
        };
        assert_eq!(p.mode(), Mode::Exact);
        assert_eq!(p.sigma(Mask(0b11)).unwrap(), Prob::int(4));
        p.exponents = vec![Prob::ratio(1, 2)];
        assert_eq!(p.mode(), Mode::Float);
        assert!(matches!(p.sigma(Mask(0b11)).unwrap(), Prob::Float(_)));
    }
}
