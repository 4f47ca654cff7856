use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::primitives::{Mask, Mode, Prob, Row};

use super::params::{
    ArParams, EbaParams, IcParams, LogitParams, NestedLogitParams, NscParams,
    RcgParams, RrmParams,
};

pub(crate) fn check_shape(t: Mask, s: Mask, empty_ok: bool) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Schema("menus must be non-empty".into()));
    }
    if !t.is_subset_of(s) {
        return Err(Error::Shape {
            collection: t,
            menu: s,
        });
    }
    if t.is_empty() && !empty_ok {
        return Err(Error::EmptyCollection);
    }
    Ok(())
}

fn add_to(acc: &mut BTreeMap<Mask, Prob>, t: Mask, w: &Prob) {
    match acc.get_mut(&t) {
        Some(slot) => *slot = &*slot + w,
        None => {
            acc.insert(t, w.clone());
        }
    }
}

fn drop_zeros(row: BTreeMap<Mask, Prob>) -> Row {
    row.into_iter().filter(|(_, p)| !p.is_exact_zero()).collect()
}

/// Divides every weight by the total; a zero total means no weight reaches the menu.
fn normalize(weights: BTreeMap<Mask, Prob>, s: Mask) -> Result<Row> {
    let total: Prob = weights.values().sum();
    if total.is_exact_zero() {
        return Err(Error::InvalidParams(format!(
            "no weight reaches menu {s:?}"
        )));
    }
    Ok(drop_zeros(weights)
        .into_iter()
        .map(|(t, w)| (t, &w / &total))
        .collect())
}

fn value(row: &Row, t: Mask, mode: Mode) -> Prob {
    row.get(&t).cloned().unwrap_or_else(|| Prob::zero(mode))
}

fn infer_items(mask: Mask) -> usize {
    32 - mask.bits().leading_zeros() as usize
}

pub fn logit_row(p: &LogitParams, s: Mask, empty_variant: bool) -> Result<Row> {
    let mut weights = BTreeMap::new();
    for t in s.subsets() {
        if t.is_empty() && !empty_variant {
            continue;
        }
        weights.insert(t, p.weight(t)?.clone());
    }
    normalize(weights, s)
}

pub fn rcg_row(p: &RcgParams, s: Mask, empty_variant: bool) -> Result<Row> {
    let mut acc = BTreeMap::new();
    for (c, w) in &p.m {
        let t = c.intersection(s);
        if t.is_empty() && !empty_variant {
            continue;
        }
        add_to(&mut acc, t, w);
    }
    if empty_variant {
        Ok(drop_zeros(acc))
    } else {
        normalize(acc, s)
    }
}

pub fn ic_row(p: &IcParams, s: Mask, empty_variant: bool) -> Result<Row> {
    if let Some(x) = s.items().find(|x| *x >= p.gamma.len()) {
        return Err(Error::InvalidParams(format!("γ is undefined for item {x}")));
    }
    let one = Prob::one(Mode::Exact);
    let miss: Vec<Prob> = p.gamma.iter().map(|g| &one - g).collect();
    let mut row = BTreeMap::new();
    for t in s.subsets() {
        if t.is_empty() && !empty_variant {
            continue;
        }
        let num = t
            .items()
            .map(|x| &p.gamma[x])
            .chain(s.difference(t).items().map(|y| &miss[y]))
            .fold(one.clone(), |acc, f| acc * f);
        row.insert(t, num);
    }
    if empty_variant {
        return Ok(drop_zeros(row));
    }
    let none = s.items().fold(one.clone(), |acc, y| acc * &miss[y]);
    let den = &one - &none;
    if den.is_exact_zero() {
        return Err(Error::InvalidParams("γ must lie in (0, 1)".into()));
    }
    Ok(drop_zeros(row).into_iter().map(|(t, w)| (t, &w / &den)).collect())
}

fn attribute_row<'a>(pairs: impl Iterator<Item = (Mask, &'a Prob)>, s: Mask) -> Result<Row> {
    let mut acc = BTreeMap::new();
    for (carrier, w) in pairs {
        let t = carrier.intersection(s);
        if !t.is_empty() {
            add_to(&mut acc, t, w);
        }
    }
    normalize(acc, s)
}

pub fn eba_row(p: &EbaParams, s: Mask) -> Result<Row> {
    attribute_row(p.attributes.iter().map(|a| (a.carrier, &a.weight)), s)
}

pub fn ar_row(p: &ArParams, s: Mask) -> Result<Row> {
    attribute_row(p.attributes.iter().map(|a| (a.carrier, &a.theta)), s)
}

pub fn rrm_row(p: &RrmParams, s: Mask) -> Result<Row> {
    p.validate(p.salience.len())?;
    if infer_items(s) > p.salience.len() {
        return Err(Error::InvalidParams("menu mentions an item without parameters".into()));
    }
    let mut acc = BTreeMap::new();
    for x in s.items() {
        add_to(&mut acc, p.constraints[x].intersection(s), &p.salience[x]);
    }
    normalize(acc, s)
}

fn nest_row(nests: &[Mask], s: Mask, sigma: impl Fn(Mask) -> Result<Prob>) -> Result<Row> {
    let n = infer_items(nests.iter().fold(Mask::EMPTY, |a, b| a.union(*b)));
    if !s.is_subset_of(Mask::full(n)) {
        return Err(Error::InvalidParams("menu mentions an item outside every nest".into()));
    }
    let mut acc = BTreeMap::new();
    for nest in nests {
        let t = nest.intersection(s);
        if !t.is_empty() {
            acc.insert(t, sigma(t)?);
        }
    }
    normalize(acc, s)
}

pub fn nsc_row(p: &NscParams, s: Mask) -> Result<Row> {
    p.validate(infer_items(p.nests.iter().fold(Mask::EMPTY, |a, b| a.union(*b))))?;
    nest_row(&p.nests, s, |t| p.weight(t))
}

pub fn nested_logit_row(p: &NestedLogitParams, s: Mask) -> Result<Row> {
    p.validate(p.utility.len())?;
    nest_row(&p.nests, s, |t| p.sigma(t))
}

/// μ_LG(T,S); the empty-collection variant also needs π(∅).
pub fn eval_logit(p: &LogitParams, t: Mask, s: Mask, empty_variant: bool) -> Result<Prob> {
    check_shape(t, s, empty_variant)?;
    Ok(value(&logit_row(p, s, empty_variant)?, t, p.mode()))
}

pub fn eval_rcg(p: &RcgParams, t: Mask, s: Mask, empty_variant: bool) -> Result<Prob> {
    check_shape(t, s, empty_variant)?;
    Ok(value(&rcg_row(p, s, empty_variant)?, t, p.mode()))
}

pub fn eval_ic(p: &IcParams, t: Mask, s: Mask, empty_variant: bool) -> Result<Prob> {
    check_shape(t, s, empty_variant)?;
    p.validate(p.gamma.len())?;
    Ok(value(&ic_row(p, s, empty_variant)?, t, p.mode()))
}

pub fn eval_eba(p: &EbaParams, t: Mask, s: Mask) -> Result<Prob> {
    check_shape(t, s, false)?;
    Ok(value(&eba_row(p, s)?, t, p.mode()))
}

/// First-stage probability μ_AR(T,S) that the salient attributes leave exactly T.
pub fn eval_ar_first_stage(p: &ArParams, t: Mask, s: Mask) -> Result<Prob> {
    check_shape(t, s, false)?;
    Ok(value(&ar_row(p, s)?, t, p.mode()))
}

pub fn eval_rrm(p: &RrmParams, t: Mask, s: Mask) -> Result<Prob> {
    check_shape(t, s, false)?;
    Ok(value(&rrm_row(p, s)?, t, p.mode()))
}

pub fn eval_nsc(p: &NscParams, t: Mask, s: Mask) -> Result<Prob> {
    check_shape(t, s, false)?;
    Ok(value(&nsc_row(p, s)?, t, p.mode()))
}

pub fn eval_nested_logit(p: &NestedLogitParams, t: Mask, s: Mask) -> Result<Prob> {
    check_shape(t, s, false)?;
    Ok(value(&nested_logit_row(p, s)?, t, p.mode()))
}

/// Item-level attribute-rule probability together with its split over the
/// first-stage collections.
#[derive(Clone, Debug, PartialEq)]
pub struct ArItem {
    pub p: Prob,
    /// T → (μ_AR(T,S), ρ_S(x|T)) for every T reached with positive probability.
    pub decomposition: BTreeMap<Mask, (Prob, Prob)>,
}

impl ArItem {
    /// Σ_T μ_AR(T,S)·ρ_S(x|T).
    pub fn recombined(&self) -> Prob {
        self.decomposition.values().map(|(mu, rho)| mu * rho).sum()
    }
}

/// p_AR(x,S) from the direct formula, plus the decomposition through μ_AR and ρ_S.
pub fn eval_ar_item(p: &ArParams, x: usize, s: Mask) -> Result<ArItem> {
    if !s.contains(x) {
        return Err(Error::Shape {
            collection: Mask::singleton(x),
            menu: s,
        });
    }
    let live: Vec<usize> = (0..p.attributes.len())
        .filter(|&i| !p.attributes[i].carrier.intersection(s).is_empty())
        .collect();
    if live.is_empty() {
        return Err(Error::InvalidParams(format!("no attribute reaches menu {s:?}")));
    }
    let theta = |i: usize| &p.attributes[i].theta;
    let within = |i: usize, t: Mask| -> Prob {
        let total: u64 = t.items().map(|y| p.eta(i, y)).sum();
        Prob::ratio(p.eta(i, x) as i64, total as i64)
    };
    let theta_total: Prob = live.iter().map(|&i| theta(i)).sum();
    let direct: Prob = live
        .iter()
        .map(|&i| &(theta(i) / &theta_total) * &within(i, p.attributes[i].carrier.intersection(s)))
        .sum();

    let mut groups: BTreeMap<Mask, Vec<usize>> = BTreeMap::new();
    for &i in &live {
        groups
            .entry(p.attributes[i].carrier.intersection(s))
            .or_default()
            .push(i);
    }
    let decomposition = groups
        .into_iter()
        .map(|(t, members)| {
            let group_total: Prob = members.iter().map(|&i| theta(i)).sum();
            let mu = &group_total / &theta_total;
            let rho: Prob = members
                .iter()
                .map(|&i| &(theta(i) / &group_total) * &within(i, t))
                .sum();
            (t, (mu, rho))
        })
        .collect();
    Ok(ArItem {
        p: direct,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::params::{ArAttribute, Attribute};

    fn m(bits: u32) -> Mask {
        Mask(bits)
    }

    #[test]
    fn logit_direct_sum() {
        let p = LogitParams {
            pi: [(m(1), Prob::int(2)), (m(2), Prob::int(1)), (m(3), Prob::int(1))].into(),
            pi_empty: None,
        };
        assert_eq!(eval_logit(&p, m(1), m(3), false).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_logit(&p, m(2), m(3), false).unwrap(), Prob::ratio(1, 4));
        assert_eq!(eval_logit(&p, m(3), m(3), false).unwrap(), Prob::ratio(1, 4));
        assert_eq!(eval_logit(&p, m(1), m(1), false).unwrap(), Prob::int(1));
        assert!(matches!(
            eval_logit(&p, m(0), m(3), true),
            Err(Error::MissingWeight(_))
        ));
        assert!(matches!(eval_logit(&p, m(4), m(3), false), Err(Error::Shape { .. })));
    }

    #[test]
    fn rcg_standard_and_empty_variant() {
        let p = RcgParams {
            m: [
                (m(0b011), Prob::ratio(1, 2)),
                (m(0b100), Prob::ratio(1, 4)),
                (m(0b111), Prob::ratio(1, 4)),
            ]
            .into(),
        };
        assert_eq!(eval_rcg(&p, m(0b001), m(0b101), false).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_rcg(&p, m(0b100), m(0b101), false).unwrap(), Prob::ratio(1, 4));
        assert_eq!(eval_rcg(&p, m(0b101), m(0b101), false).unwrap(), Prob::ratio(1, 4));

        let q = RcgParams {
            m: [(m(0b010), Prob::ratio(1, 2)), (m(0b011), Prob::ratio(1, 2))].into(),
        };
        assert_eq!(eval_rcg(&q, m(0b001), m(0b001), false).unwrap(), Prob::int(1));

        let o = RcgParams {
            m: [(m(0b011), Prob::ratio(1, 2)), (m(0b100), Prob::ratio(1, 2))].into(),
        };
        assert_eq!(eval_rcg(&o, m(0), m(0b001), true).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_rcg(&o, m(1), m(0b001), true).unwrap(), Prob::ratio(1, 2));
    }

    #[test]
    fn ic_worked_values() {
        let p = IcParams {
            gamma: vec![Prob::ratio(1, 2), Prob::ratio(1, 3)],
        };
        assert_eq!(eval_ic(&p, m(1), m(3), false).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_ic(&p, m(2), m(3), false).unwrap(), Prob::ratio(1, 4));
        assert_eq!(eval_ic(&p, m(3), m(3), false).unwrap(), Prob::ratio(1, 4));
        assert_eq!(eval_ic(&p, m(0), m(1), true).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_ic(&p, m(1), m(1), true).unwrap(), Prob::ratio(1, 2));
    }

    #[test]
    fn eba_and_attribute_rule() {
        let eba = EbaParams {
            attributes: vec![
                Attribute { weight: Prob::ratio(3, 5), carrier: m(0b011) },
                Attribute { weight: Prob::ratio(2, 5), carrier: m(0b100) },
            ],
        };
        assert_eq!(eval_eba(&eba, m(0b001), m(0b101)).unwrap(), Prob::ratio(3, 5));
        assert_eq!(eval_eba(&eba, m(0b100), m(0b101)).unwrap(), Prob::ratio(2, 5));
        assert_eq!(eval_eba(&eba, m(0b001), m(0b001)).unwrap(), Prob::int(1));

        let ar = ArParams {
            attributes: vec![
                ArAttribute { theta: Prob::int(1), carrier: m(0b011), eta: [(0, 1), (1, 2)].into() },
                ArAttribute { theta: Prob::int(1), carrier: m(0b100), eta: [(2, 1)].into() },
            ],
        };
        assert_eq!(eval_ar_first_stage(&ar, m(0b011), m(0b111)).unwrap(), Prob::ratio(1, 2));
        let a = eval_ar_item(&ar, 0, m(0b111)).unwrap();
        assert_eq!(a.p, Prob::ratio(1, 6));
        assert_eq!(a.decomposition[&m(0b011)], (Prob::ratio(1, 2), Prob::ratio(1, 3)));
        assert_eq!(a.recombined(), a.p);
        assert_eq!(eval_ar_item(&ar, 1, m(0b111)).unwrap().p, Prob::ratio(1, 3));
        assert_eq!(eval_ar_item(&ar, 2, m(0b111)).unwrap().p, Prob::ratio(1, 2));
    }

    #[test]
    fn rrm_two_item_table() {
        let p = RrmParams {
            salience: vec![Prob::int(1), Prob::int(1)],
            constraints: vec![m(0b11), m(0b10)],
        };
        assert_eq!(eval_rrm(&p, m(0b11), m(0b11)).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_rrm(&p, m(0b10), m(0b11)).unwrap(), Prob::ratio(1, 2));
        assert_eq!(eval_rrm(&p, m(0b01), m(0b11)).unwrap(), Prob::int(0));
        assert_eq!(eval_rrm(&p, m(0b01), m(0b01)).unwrap(), Prob::int(1));
    }

    #[test]
    fn nsc_and_nested_logit() {
        let p = NscParams {
            nests: vec![m(0b011), m(0b100)],
            sigma: [
                (m(0b001), Prob::int(1)),
                (m(0b010), Prob::int(2)),
                (m(0b011), Prob::int(4)),
                (m(0b100), Prob::int(3)),
            ]
            .into(),
        };
        assert_eq!(eval_nsc(&p, m(0b001), m(0b101)).unwrap(), Prob::ratio(1, 4));
        assert_eq!(eval_nsc(&p, m(0b100), m(0b101)).unwrap(), Prob::ratio(3, 4));
        assert_eq!(eval_nsc(&p, m(0b011), m(0b111)).unwrap(), Prob::ratio(4, 7));

        let nl = NestedLogitParams {
            nests: vec![m(0b011), m(0b100)],
            utility: vec![Prob::int(1), Prob::int(1), Prob::int(3)],
            exponents: vec![Prob::int(2), Prob::int(1)],
        };
        assert_eq!(eval_nested_logit(&nl, m(0b011), m(0b111)).unwrap(), Prob::ratio(4, 7));
    }
}
