//! Fixtures shared by the integration tests, and oracles that compute choice
//! probabilities by enumerating each model's random process directly.

#![allow(dead_code)]

use std::collections::BTreeMap;

use scclab::models::{
    generate_scc, ArAttribute, ArParams, Attribute, EbaParams, IcParams, LogitParams, ModelParams,
    ModelSpec, NestedLogitParams, NscParams, RcgParams, RrmParams,
};
use scclab::{Mask, Prob, Scc, Universe};

pub fn q(num: i64, den: i64) -> Prob {
    Prob::ratio(num, den)
}

pub fn letters(n: usize) -> Universe {
    Universe::letters(n).unwrap()
}

pub fn set(u: &Universe, text: &str) -> Mask {
    u.parse_set(text).unwrap()
}

/// π({a}) = 2, π({b}) = π({a,b}) = 1.
pub fn logit_example() -> ModelSpec {
    let pi = BTreeMap::from([(Mask(0b01), Prob::int(2)), (Mask(0b10), Prob::int(1)), (Mask(0b11), Prob::int(1))]);
    ModelSpec::standard(ModelParams::Logit(LogitParams { pi, pi_empty: None }))
}

/// γ = (1/2, 1/3).
pub fn ic_example() -> ModelSpec {
    ModelSpec::standard(ModelParams::Ic(IcParams {
        gamma: vec![q(1, 2), q(1, 3)],
    }))
}

/// m({a,b}) = 1/2, m({c}) = 1/4, m({a,b,c}) = 1/4.
pub fn rcg_example() -> ModelSpec {
    let m = BTreeMap::from([(Mask(0b011), q(1, 2)), (Mask(0b100), q(1, 4)), (Mask(0b111), q(1, 4))]);
    ModelSpec::standard(ModelParams::Rcg(RcgParams { m }))
}

/// ω = 3/5 on {a,b}, 2/5 on {c}.
pub fn eba_example() -> ModelSpec {
    ModelSpec::standard(ModelParams::Eba(EbaParams {
        attributes: vec![
            Attribute { weight: q(3, 5), carrier: Mask(0b011) },
            Attribute { weight: q(2, 5), carrier: Mask(0b100) },
        ],
    }))
}

/// θ = 1 on {a,b} with η = (a:1, b:2), θ = 1 on {c} with η = (c:1).
pub fn ar_example() -> ArParams {
    ArParams {
        attributes: vec![
            ArAttribute { theta: Prob::int(1), carrier: Mask(0b011), eta: BTreeMap::from([(0, 1), (1, 2)]) },
            ArAttribute { theta: Prob::int(1), carrier: Mask(0b100), eta: BTreeMap::from([(2, 1)]) },
        ],
    }
}

/// Nests {a,b} and {c}; σ({a}) = 1, σ({b}) = 2, σ({a,b}) = 4, σ({c}) = 3.
pub fn nsc_example() -> ModelSpec {
    let sigma = BTreeMap::from([
        (Mask(0b001), Prob::int(1)),
        (Mask(0b010), Prob::int(2)),
        (Mask(0b011), Prob::int(4)),
        (Mask(0b100), Prob::int(3)),
    ]);
    ModelSpec::standard(ModelParams::Nsc(NscParams { nests: vec![Mask(0b011), Mask(0b100)], sigma }))
}

/// v = (1, 1, 3), η = 2 on {a,b} and 1 on {c}.
pub fn nested_logit_example() -> ModelSpec {
    ModelSpec::standard(ModelParams::NestedLogit(NestedLogitParams {
        nests: vec![Mask(0b011), Mask(0b100)],
        utility: vec![Prob::int(1), Prob::int(1), Prob::int(3)],
        exponents: vec![Prob::int(2), Prob::int(1)],
    }))
}

/// Q(x) = {x,y}, Q(y) = {y}, s = (1, 1) on the universe {x, y}.
pub fn rrm_table_two() -> (ModelSpec, Universe) {
    let u = Universe::new(["x", "y"]).unwrap();
    let spec = ModelSpec::standard(ModelParams::Rrm(RrmParams {
        salience: vec![Prob::int(1), Prob::int(1)],
        constraints: vec![Mask(0b11), Mask(0b10)],
    }));
    (spec, u)
}

pub fn scc_of(spec: &ModelSpec, n: usize) -> Scc {
    generate_scc(spec, &letters(n)).unwrap()
}

/// Adds `bump` to μ(T,S) on one menu and renormalizes that row.
pub fn perturb(scc: &Scc, menu: Mask, collection: Mask, bump: &Prob) -> Scc {
    let mut rows = scc.rows().clone();
    let row = rows.get_mut(&menu).unwrap();
    let old = row.get(&collection).cloned().unwrap_or(Prob::int(0));
    row.insert(collection, &old + bump);
    let total: Prob = row.values().sum();
    for p in row.values_mut() {
        *p = &*p / &total;
    }
    Scc::new(scc.universe().clone(), scc.allows_empty(), rows).unwrap()
}

// Oracles. Each draws the model's latent objects one by one and accumulates
// the probability of the resulting collection.

fn add(acc: &mut BTreeMap<Mask, Prob>, t: Mask, p: Prob) {
    let slot = acc.entry(t).or_insert(Prob::int(0));
    *slot = &*slot + &p;
}

fn condition_on_nonempty(acc: BTreeMap<Mask, Prob>) -> BTreeMap<Mask, Prob> {
    let mass: Prob = acc.iter().filter(|(t, _)| !t.is_empty()).map(|(_, p)| p).sum();
    acc.into_iter()
        .filter(|(t, p)| !t.is_empty() && !p.is_exact_zero())
        .map(|(t, p)| (t, &p / &mass))
        .collect()
}

/// Each item of S enters independently; empty draws are redrawn.
pub fn ic_oracle(gamma: &[Prob], s: Mask) -> BTreeMap<Mask, Prob> {
    let mut acc = BTreeMap::new();
    let items: Vec<usize> = s.items().collect();
    for bits in 0u32..(1 << items.len()) {
        let mut t = Mask::EMPTY;
        let mut p = Prob::int(1);
        for (k, &x) in items.iter().enumerate() {
            if bits >> k & 1 == 1 {
                t = t.with(x);
                p = p * &gamma[x];
            } else {
                p = p * &(Prob::int(1) - &gamma[x]);
            }
        }
        add(&mut acc, t, p);
    }
    condition_on_nonempty(acc)
}

/// A category is drawn from m; draws missing S are redrawn.
pub fn rcg_oracle(m: &BTreeMap<Mask, Prob>, s: Mask) -> BTreeMap<Mask, Prob> {
    let mut acc = BTreeMap::new();
    for (c, w) in m {
        add(&mut acc, c.intersection(s), w.clone());
    }
    condition_on_nonempty(acc)
}

/// A reference item is drawn with probability ∝ s; its constraint set is chosen.
pub fn rrm_oracle(salience: &[Prob], constraints: &[Mask], s: Mask) -> BTreeMap<Mask, Prob> {
    let mut acc = BTreeMap::new();
    for x in s.items() {
        add(&mut acc, constraints[x].intersection(s), salience[x].clone());
    }
    condition_on_nonempty(acc)
}

/// A nest is drawn with probability ∝ σ(N ∩ S).
pub fn nsc_oracle(nests: &[Mask], sigma: &BTreeMap<Mask, Prob>, s: Mask) -> BTreeMap<Mask, Prob> {
    let mut acc = BTreeMap::new();
    for n in nests {
        let t = n.intersection(s);
        if !t.is_empty() {
            add(&mut acc, t, sigma[&t].clone());
        }
    }
    condition_on_nonempty(acc)
}

/// Item-level attribute rule: attribute i among those meeting S with
/// probability ∝ θ_i, then x ∈ B_i ∩ S with probability ∝ η^i_x.
pub fn ar_item_oracle(p: &ArParams, x: usize, s: Mask) -> Prob {
    let live: Vec<&ArAttribute> = p.attributes.iter().filter(|a| !a.carrier.intersection(s).is_empty()).collect();
    let total: Prob = live.iter().map(|a| &a.theta).sum();
    let mut out = Prob::int(0);
    for a in live {
        let Some(eta) = a.eta.get(&x).filter(|_| s.contains(x)) else { continue };
        let mass: u64 = a.carrier.intersection(s).items().map(|y| a.eta[&y]).sum();
        out = out + &(&(&a.theta / &total) * &Prob::ratio(*eta as i64, mass as i64));
    }
    out
}
