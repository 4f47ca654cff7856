//! Brute-force checks of consequences the axioms are known to imply. They
//! share no code with the main checks so they can serve as cross-checks.

use crate::error::Result;
use crate::primitives::{Mask, Prob, Scc, ToleranceConfig};

/// A `(T, S, x)` instance.
pub type Instance = (Mask, Mask, usize);

fn le(tol: &ToleranceConfig, a: &Prob, b: &Prob) -> bool {
    match (a, b) {
        (Prob::Exact(x), Prob::Exact(y)) => x <= y,
        _ => a.to_f64() <= b.to_f64() + tol.eps_zero.max(tol.eps_eq * b.to_f64().abs()),
    }
}

fn removal_instances(scc: &Scc) -> impl Iterator<Item = Instance> + '_ {
    scc.universe().menus().filter(|s| s.len() >= 2).flat_map(|s| {
        s.items()
            .flat_map(move |x| s.without(x).nonempty_subsets().map(move |t| (t, s, x)))
    })
}

/// Instances where μ(T,S) > μ(T,S∖x).
pub fn monotonicity_violations(scc: &Scc, tol: &ToleranceConfig) -> Result<Vec<Instance>> {
    scc.require_complete()?;
    let mut out = Vec::new();
    for (t, s, x) in removal_instances(scc) {
        if !le(tol, &scc.lookup(t, s)?, &scc.lookup(t, s.without(x))?) {
            out.push((t, s, x));
        }
    }
    Ok(out)
}

/// Instances breaking either "μ(T,S∖x) = 0 ⇒ μ(T,S) + μ(T∪x,S) = 0" (part 1) or
/// "μ(T,S∖x) > 0 ⇒ μ(T,S) + μ(T∪x,S) > 0" (part 2).
pub fn zero_propagation_violations(scc: &Scc, tol: &ToleranceConfig) -> Result<Vec<(Instance, u8)>> {
    scc.require_complete()?;
    let mut out = Vec::new();
    for (t, s, x) in removal_instances(scc) {
        let before = scc.lookup(t, s.without(x))?;
        let after = scc.lookup(t, s)? + scc.lookup(t.with(x), s)?;
        let (b0, a0) = (tol.is_zero(&before), tol.is_zero(&after));
        if b0 && !a0 {
            out.push(((t, s, x), 1));
        }
        if !b0 && a0 {
            out.push(((t, s, x), 2));
        }
    }
    Ok(out)
}

/// All `(T, T′, S, S′)` with four positive probabilities and
/// μ(T,S)·μ(T′,S′) ≠ μ(T′,S)·μ(T,S′), over every pair of menus.
pub fn iis_violations_bruteforce(scc: &Scc, tol: &ToleranceConfig) -> Result<Vec<(Mask, Mask, Mask, Mask)>> {
    scc.require_complete()?;
    let menus: Vec<Mask> = scc.universe().menus().collect();
    let mut out = Vec::new();
    for &s in &menus {
        for &s2 in &menus {
            if s2 <= s {
                continue;
            }
            let common = s.intersection(s2);
            for t in common.nonempty_subsets() {
                for t2 in common.nonempty_subsets().filter(|t2| *t2 > t) {
                    let a = scc.lookup(t, s)?;
                    let b = scc.lookup(t2, s)?;
                    let c = scc.lookup(t, s2)?;
                    let d = scc.lookup(t2, s2)?;
                    if [&a, &b, &c, &d].iter().all(|p| tol.is_positive(p))
                        && !tol.eq(&(&a * &d), &(&b * &c))
                    {
                        out.push((t, t2, s, s2));
                    }
                }
            }
        }
    }
    Ok(out)
}
