//! Support-pattern axioms and the revealed structures they rely on.

use crate::error::{Error, Result};
use crate::primitives::{Mask, Prob, Scc, ToleranceConfig};

use super::ctx::{item, set, Acc, Ctx};
use super::{AxiomId, AxiomReport, Quantity, Relation};

/// Q^R(x) = {x} ∪ {y : μ({x},{x,y}) = 0}, indexed by item.
pub fn derive_revealed_constraints(scc: &Scc, tol: &ToleranceConfig) -> Result<Vec<Mask>> {
    let n = scc.n();
    let mut q = Vec::with_capacity(n);
    for x in 0..n {
        let mut qx = Mask::singleton(x);
        for y in (0..n).filter(|&y| y != x) {
            let pair = Mask::singleton(x).with(y);
            if !scc.has_menu(pair) {
                let (a, b) = (x.min(y), x.max(y));
                let u = scc.universe();
                return Err(Error::MissingBinaryMenu(
                    u.label(a).to_string(),
                    u.label(b).to_string(),
                ));
            }
            if tol.is_zero(&scc.lookup(Mask::singleton(x), pair)?) {
                qx = qx.with(y);
            }
        }
        q.push(qx);
    }
    Ok(q)
}

/// Non-empty collections chosen with positive probability from the grand set,
/// in numeric order.
pub fn derive_revealed_nests(scc: &Scc, tol: &ToleranceConfig) -> Result<Vec<Mask>> {
    let row = scc.row(scc.grand_set()).ok_or(Error::MissingGrandSet)?;
    Ok(row
        .iter()
        .filter(|(t, p)| !t.is_empty() && t.is_subset_of(scc.grand_set()) && tol.is_positive(p))
        .map(|(t, _)| *t)
        .collect())
}

fn zero_like(p: &Prob) -> Prob {
    Prob::zero(p.mode())
}

/// μ(T,S) must be positive exactly when `expected` says so.
fn support_instance(ctx: &Ctx, acc: &mut Acc, t: Mask, s: Mask, expected: bool) {
    acc.checked += 1;
    let p = ctx.mu(t, s);
    let positive = ctx.supported(p);
    if positive != expected {
        let relation = if expected { Relation::Gt } else { Relation::Eq };
        acc.fail_values(
            vec![("S", set(s)), ("T", set(t))],
            relation,
            p.clone(),
            zero_like(p),
        );
    }
}

pub(crate) fn pos1(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::Pos1);
    for s in ctx.scc.universe().menus() {
        for x in s.items() {
            acc.checked += 1;
            let mass: Prob = s
                .nonempty_subsets()
                .filter(|t| t.contains(x))
                .map(|t| ctx.mu(t, s))
                .sum();
            if !ctx.supported(&mass) {
                let zero = zero_like(&mass);
                acc.fail_values(vec![("S", set(s)), ("x", item(x))], Relation::Gt, mass, zero);
            }
        }
    }
    acc.finish(ctx)
}

/// POS2 and POS4: T is chosen iff T = A∩S for one of the given sets A.
pub(crate) fn pos_structured(ctx: &Ctx, axiom: AxiomId, sets: &[Mask]) -> AxiomReport {
    let mut acc = ctx.acc(axiom);
    for s in ctx.scc.universe().menus() {
        for t in s.nonempty_subsets() {
            let expected = sets.iter().any(|a| a.intersection(s) == t);
            support_instance(ctx, &mut acc, t, s, expected);
        }
    }
    acc.finish(ctx)
}

/// T is chosen iff T = Q^R(x)∩S for some x in S.
pub(crate) fn pos3(ctx: &Ctx, q: &[Mask]) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::Pos3);
    for s in ctx.scc.universe().menus() {
        for t in s.nonempty_subsets() {
            let expected = s.items().any(|x| q[x].intersection(s) == t);
            support_instance(ctx, &mut acc, t, s, expected);
        }
    }
    acc.finish(ctx)
}

pub(crate) fn full_support(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::FullSupport);
    let skip = usize::from(!ctx.scc.allows_empty());
    for s in ctx.scc.universe().menus() {
        for t in s.subsets().skip(skip) {
            support_instance(ctx, &mut acc, t, s, true);
        }
    }
    acc.finish(ctx)
}

pub(crate) fn det_full_choice(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::DetFullChoice);
    for s in ctx.scc.universe().menus() {
        acc.checked += 1;
        let p = ctx.mu(s, s);
        let one = Prob::one(p.mode());
        if !ctx.eq(p, &one) {
            acc.fail_values(vec![("S", set(s))], Relation::Eq, p.clone(), one);
        }
    }
    acc.finish(ctx)
}

pub(crate) fn distinct_q(ctx: &Ctx) -> Result<AxiomReport> {
    let q = derive_revealed_constraints(ctx.scc, ctx.tol)?;
    let mut acc = ctx.acc(AxiomId::DistinctQ);
    for x in 0..q.len() {
        for y in x + 1..q.len() {
            acc.checked += 1;
            if q[x] == q[y] {
                acc.fail(
                    vec![("x", item(x)), ("y", item(y))],
                    Relation::Ne,
                    Quantity::Set(q[x]),
                    Quantity::Set(q[y]),
                );
            }
        }
    }
    Ok(acc.finish(ctx))
}

pub(crate) fn partition(ctx: &Ctx) -> Result<AxiomReport> {
    let nests = derive_revealed_nests(ctx.scc, ctx.tol)?;
    let mut acc = ctx.acc(AxiomId::Partition);
    for i in 0..nests.len() {
        for j in i + 1..nests.len() {
            acc.checked += 1;
            let common = nests[i].intersection(nests[j]);
            if !common.is_empty() {
                acc.fail(
                    vec![("N", set(nests[i])), ("N'", set(nests[j]))],
                    Relation::Eq,
                    Quantity::Set(common),
                    Quantity::Set(Mask::EMPTY),
                );
            }
        }
    }
    acc.checked += 1;
    let covered = nests.iter().fold(Mask::EMPTY, |a, b| a.union(*b));
    if covered != ctx.grand() {
        acc.fail(
            vec![("X", set(ctx.grand()))],
            Relation::Eq,
            Quantity::Set(covered),
            Quantity::Set(ctx.grand()),
        );
    }
    Ok(acc.finish(ctx))
}

/// μ(T,S) = μ(T,S∖x) whenever μ({x},S) = 0, μ(T,S) > 0 and μ(T,S∖x) > 0.
pub(crate) fn paf(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::Paf);
    for s in ctx.scc.universe().menus() {
        if s.len() < 2 {
            continue;
        }
        for x in s.items() {
            let rest = s.without(x);
            let guard = ctx.zero(ctx.mu(Mask::singleton(x), s));
            for t in rest.nonempty_subsets() {
                let (now, before) = (ctx.mu(t, s), ctx.mu(t, rest));
                if !guard || ctx.zero(now) || ctx.zero(before) {
                    acc.vacuous += 1;
                    continue;
                }
                acc.checked += 1;
                if !ctx.eq(now, before) {
                    acc.fail_values(
                        vec![("S", set(s)), ("x", item(x)), ("T", set(t))],
                        Relation::Eq,
                        now.clone(),
                        before.clone(),
                    );
                }
            }
        }
    }
    acc.finish(ctx)
}
