//! Ratio-invariance axioms: IIS, IIS_O, the ratio clause of SINGLETON, and PIIS.
//!
//! Each pair of collections gets a reference menu, the first menu in numeric
//! order where both are chosen with positive probability; every later such menu
//! is compared with it by cross-multiplication. In exact arithmetic this is the
//! same verdict as comparing every pair of menus.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::primitives::{Mask, Prob};

use super::ctx::{item, set, Acc, Ctx};
use super::{AxiomId, AxiomReport, Relation};

/// Walks `(S, T, T′)` with `T < T′` drawn from `collections(S)`; calls `on_pair`
/// with the reference menu and current menu for every co-positive pair.
fn scan_pairs(
    ctx: &Ctx,
    acc: &mut Acc,
    collections: impl Fn(Mask) -> Vec<Mask>,
    mut on_pair: impl FnMut(&mut Acc, Mask, Mask, Mask, Mask),
) {
    let mut refs: HashMap<(Mask, Mask), Mask> = HashMap::new();
    for s in ctx.scc.universe().menus() {
        let subs = collections(s);
        for (i, &t) in subs.iter().enumerate() {
            if ctx.zero(ctx.mu(t, s)) {
                acc.vacuous += (subs.len() - i - 1) as u64;
                continue;
            }
            for &t2 in &subs[i + 1..] {
                if ctx.zero(ctx.mu(t2, s)) {
                    acc.vacuous += 1;
                    continue;
                }
                acc.checked += 1;
                match refs.entry((t, t2)) {
                    Entry::Vacant(e) => {
                        e.insert(s);
                    }
                    Entry::Occupied(e) => on_pair(acc, t, t2, *e.get(), s),
                }
            }
        }
    }
}

pub(crate) fn iis(ctx: &Ctx, with_empty: bool) -> AxiomReport {
    let axiom = if with_empty { AxiomId::IisO } else { AxiomId::Iis };
    let mut acc = ctx.acc(axiom);
    let skip = usize::from(!with_empty);
    scan_pairs(
        ctx,
        &mut acc,
        |s| s.subsets().skip(skip).collect(),
        |acc, t, t2, r, s| {
            let lhs = ctx.mu(t, r) * ctx.mu(t2, s);
            let rhs = ctx.mu(t2, r) * ctx.mu(t, s);
            if !ctx.eq(&lhs, &rhs) {
                acc.fail_values(
                    vec![("T", set(t)), ("T'", set(t2)), ("S", set(r)), ("S'", set(s))],
                    Relation::Eq,
                    lhs,
                    rhs,
                );
            }
        },
    );
    acc.finish(ctx)
}

pub(crate) fn singleton(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::Singleton);
    for s in ctx.scc.universe().menus() {
        for t in s.nonempty_subsets() {
            acc.checked += 1;
            let p = ctx.mu(t, s);
            if t.len() == 1 {
                if !ctx.supported(p) {
                    acc.fail_values(
                        vec![("T", set(t)), ("S", set(s))],
                        Relation::Gt,
                        p.clone(),
                        Prob::zero(p.mode()),
                    );
                }
            } else if ctx.supported(p) {
                acc.fail_values(
                    vec![("T", set(t)), ("S", set(s))],
                    Relation::Eq,
                    p.clone(),
                    Prob::zero(p.mode()),
                );
            }
        }
    }
    scan_pairs(
        ctx,
        &mut acc,
        |s| s.items().map(Mask::singleton).collect(),
        |acc, t, t2, r, s| {
            let lhs = ctx.mu(t, r) * ctx.mu(t2, s);
            let rhs = ctx.mu(t2, r) * ctx.mu(t, s);
            if !ctx.eq(&lhs, &rhs) {
                acc.fail_values(
                    vec![
                        ("x", item(t.first().unwrap())),
                        ("y", item(t2.first().unwrap())),
                        ("S", set(r)),
                        ("S'", set(s)),
                    ],
                    Relation::Eq,
                    lhs,
                    rhs,
                );
            }
        },
    );
    acc.finish(ctx)
}

/// Chain value μ(T,S)/μ(T*,S) · μ(T*,S′)/μ(T′,S′).
pub(crate) fn chain(mu: impl Fn(Mask, Mask) -> Prob, t: Mask, t2: Mask, star: Mask, s: Mask, s2: Mask) -> Prob {
    &(&mu(t, s) / &mu(star, s)) * &(&mu(star, s2) / &mu(t2, s2))
}

/// PIIS in two passes. First, the ratio of any two collections must agree on
/// every menu where both are positive (chains with T* = T′ and S = S′).
/// Second, with those ratios R fixed, R(T,T*)·R(T*,T′) must not depend on T*.
pub(crate) fn piis(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::Piis);
    let mut refs: HashMap<(Mask, Mask), Mask> = HashMap::new();
    let mut home: HashMap<Mask, Mask> = HashMap::new();

    for s in ctx.scc.universe().menus() {
        let subs: Vec<Mask> = s.nonempty_subsets().collect();
        for (i, &t) in subs.iter().enumerate() {
            if ctx.zero(ctx.mu(t, s)) {
                acc.vacuous += (subs.len() - i - 1) as u64;
                continue;
            }
            home.entry(t).or_insert(s);
            for &t2 in &subs[i + 1..] {
                if ctx.zero(ctx.mu(t2, s)) {
                    acc.vacuous += 1;
                    continue;
                }
                acc.checked += 1;
                match refs.entry((t, t2)) {
                    Entry::Vacant(e) => {
                        e.insert(s);
                    }
                    Entry::Occupied(e) => {
                        let r = *e.get();
                        let lhs = ctx.mu(t, r) * ctx.mu(t2, s);
                        let rhs = ctx.mu(t2, r) * ctx.mu(t, s);
                        if !ctx.eq(&lhs, &rhs) {
                            let left = ctx.mu(t, r) / ctx.mu(t2, r);
                            let right = ctx.mu(t, s) / ctx.mu(t2, s);
                            acc.fail_values(
                                vec![
                                    ("T", set(t)),
                                    ("T'", set(t2)),
                                    ("T*1", set(t2)),
                                    ("S1", set(r)),
                                    ("S1'", set(r)),
                                    ("T*2", set(t2)),
                                    ("S2", set(s)),
                                    ("S2'", set(s)),
                                ],
                                Relation::Eq,
                                left,
                                right,
                            );
                        }
                    }
                }
            }
        }
    }

    // Dense ratio matrix over the collections that are ever chosen.
    let mut alive: Vec<Mask> = home.keys().copied().collect();
    alive.sort();
    let k = alive.len();
    let index: HashMap<Mask, usize> = alive.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut ratio: Vec<Option<(Mask, Prob)>> = vec![None; k * k];
    for (i, &t) in alive.iter().enumerate() {
        let h = home[&t];
        ratio[i * k + i] = Some((h, Prob::one(ctx.table.mode())));
    }
    for (&(a, b), &r) in &refs {
        let (ia, ib) = (index[&a], index[&b]);
        ratio[ia * k + ib] = Some((r, ctx.mu(a, r) / ctx.mu(b, r)));
        ratio[ib * k + ia] = Some((r, ctx.mu(b, r) / ctx.mu(a, r)));
    }

    let mut vacuous_pairs = 0u64;
    for i in 0..k {
        for j in i + 1..k {
            let mut first: Option<(usize, Prob)> = None;
            for m in 0..k {
                let (Some((s, left)), Some((s2, right))) = (&ratio[i * k + m], &ratio[m * k + j]) else {
                    continue;
                };
                acc.checked += 1;
                let value = left * right;
                match &first {
                    None => first = Some((m, value)),
                    Some((m0, v0)) => {
                        if !ctx.eq(v0, &value) {
                            let (s0, _) = ratio[i * k + m0].as_ref().unwrap();
                            let (s0b, _) = ratio[m0 * k + j].as_ref().unwrap();
                            acc.fail_values(
                                vec![
                                    ("T", set(alive[i])),
                                    ("T'", set(alive[j])),
                                    ("T*1", set(alive[*m0])),
                                    ("S1", set(*s0)),
                                    ("S1'", set(*s0b)),
                                    ("T*2", set(alive[m])),
                                    ("S2", set(*s)),
                                    ("S2'", set(*s2)),
                                ],
                                Relation::Eq,
                                v0.clone(),
                                value,
                            );
                        }
                    }
                }
            }
            if first.is_none() {
                vacuous_pairs += 1;
            }
        }
    }
    acc.vacuous += vacuous_pairs;
    acc.finish(ctx)
}
