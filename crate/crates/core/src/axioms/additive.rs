//! Additivity-type axioms: REL_ADD, REL_ADD_1, REL_ADD_2 and ADDITIVITY.

use crate::primitives::{Mask, Prob};

use super::ctx::{item, set, Ctx};
use super::{AxiomId, AxiomReport, Relation};

/// μ(T,S) + μ(T∪x,S): the mass tied to T once x is added.
fn tied(ctx: &Ctx, t: Mask, s: Mask, x: usize) -> Prob {
    ctx.mu(t, s) + ctx.mu(t.with(x), s)
}

/// Relative additivity over `(S, x, T < T′)`, skipping pairs that touch the
/// excluded collection of `(S, x)`.
fn relative(ctx: &Ctx, axiom: AxiomId, excluded: impl Fn(Mask, usize) -> Option<Mask>) -> AxiomReport {
    let mut acc = ctx.acc(axiom);
    for s in ctx.scc.universe().menus() {
        if s.len() < 2 {
            continue;
        }
        for x in s.items() {
            let rest = s.without(x);
            let skip = excluded(s, x);
            let subs: Vec<Mask> = rest.nonempty_subsets().collect();
            let before: Vec<&Prob> = subs.iter().map(|&t| ctx.mu(t, rest)).collect();
            let after: Vec<Prob> = subs.iter().map(|&t| tied(ctx, t, s, x)).collect();
            for i in 0..subs.len() {
                for j in i + 1..subs.len() {
                    if skip == Some(subs[i]) || skip == Some(subs[j]) {
                        acc.vacuous += 1;
                        continue;
                    }
                    acc.checked += 1;
                    let lhs = before[i] * &after[j];
                    let rhs = before[j] * &after[i];
                    if !ctx.eq(&lhs, &rhs) {
                        acc.fail_values(
                            vec![
                                ("S", set(s)),
                                ("x", item(x)),
                                ("T", set(subs[i])),
                                ("T'", set(subs[j])),
                            ],
                            Relation::Eq,
                            lhs,
                            rhs,
                        );
                    }
                }
            }
        }
    }
    acc.finish(ctx)
}

pub(crate) fn rel_add(ctx: &Ctx) -> AxiomReport {
    relative(ctx, AxiomId::RelAdd, |_, _| None)
}

/// Relative additivity away from the collection x itself points to.
pub(crate) fn rel_add_1(ctx: &Ctx, q: &[Mask]) -> AxiomReport {
    relative(ctx, AxiomId::RelAdd1, |s, x| {
        let t = q[x].intersection(s.without(x));
        (!t.is_empty()).then_some(t)
    })
}

/// Relative additivity at T = Q^R(x)∩(S∖x) with the reference-point correction
/// μ(Q^R(x),X) / Σ_{y∈S} μ(Q^R(y),X) taken off T's side.
pub(crate) fn rel_add_2(ctx: &Ctx, q: &[Mask]) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::RelAdd2);
    let x_all = ctx.grand();
    for s in ctx.scc.universe().menus() {
        if s.len() < 2 {
            continue;
        }
        for x in s.items() {
            let rest = s.without(x);
            let others = (1u64 << rest.len()) - 2;
            let t = q[x].intersection(rest);
            if t.is_empty() {
                acc.vacuous += others;
                continue;
            }
            let total: Prob = s.items().map(|y| ctx.mu(q[y], x_all)).sum();
            if ctx.zero(&total) {
                acc.vacuous += others;
                continue;
            }
            let own = ctx.mu(q[x], x_all);
            let t_before = ctx.mu(t, rest);
            let t_after = tied(ctx, t, s, x);
            // Both sides multiplied through by the total.
            let t_after_scaled = &(&t_after * &total) - own;
            for t2 in rest.nonempty_subsets() {
                if t2 == t {
                    continue;
                }
                acc.checked += 1;
                let lhs = t_before * &tied(ctx, t2, s, x);
                let lhs_scaled = &lhs * &total;
                let rhs_scaled = ctx.mu(t2, rest) * &t_after_scaled;
                if !ctx.eq(&lhs_scaled, &rhs_scaled) {
                    let rhs = &rhs_scaled / &total;
                    acc.fail_values(
                        vec![("S", set(s)), ("x", item(x)), ("T", set(t)), ("T'", set(t2))],
                        Relation::Eq,
                        lhs,
                        rhs,
                    );
                }
            }
        }
    }
    acc.finish(ctx)
}

/// μ(T,S∖x) − μ(T,S) = μ(T∪x,S) for every T ⊆ S∖x, the empty set included.
pub(crate) fn additivity(ctx: &Ctx) -> AxiomReport {
    let mut acc = ctx.acc(AxiomId::Additivity);
    for s in ctx.scc.universe().menus() {
        for x in s.items() {
            let rest = s.without(x);
            if rest.is_empty() {
                acc.vacuous += 1;
                continue;
            }
            for t in rest.subsets() {
                acc.checked += 1;
                let lhs = ctx.mu(t, rest) - ctx.mu(t, s);
                let rhs = ctx.mu(t.with(x), s).clone();
                if !ctx.eq(&lhs, &rhs) {
                    acc.fail_values(
                        vec![("S", set(s)), ("x", item(x)), ("T", set(t))],
                        Relation::Eq,
                        lhs,
                        rhs,
                    );
                }
            }
        }
    }
    acc.finish(ctx)
}
