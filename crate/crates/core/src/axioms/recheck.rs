//! Independent re-evaluation of a witness against the dataset it came from.

use crate::error::{Error, Result};
use crate::primitives::{Mask, Prob, Scc, ToleranceConfig};

use super::ratio::chain;
use super::support::{derive_revealed_constraints, derive_revealed_nests};
use super::{AxiomId, CheckOptions, Quantity, Relation, Witness};

struct View<'a> {
    scc: &'a Scc,
    tol: &'a ToleranceConfig,
    w: &'a Witness,
}

impl View<'_> {
    fn set(&self, name: &str) -> Result<Mask> {
        self.w
            .set(name)
            .ok_or_else(|| Error::Schema(format!("witness lacks binding {name}")))
    }

    fn item(&self, name: &str) -> Result<usize> {
        self.w
            .item(name)
            .ok_or_else(|| Error::Schema(format!("witness lacks binding {name}")))
    }

    fn mu(&self, t: Mask, s: Mask) -> Result<Prob> {
        self.scc.lookup(t, s)
    }

    fn matches(&self, stored: &Quantity, computed: &Prob) -> bool {
        matches!(stored, Quantity::Value(v) if self.tol.eq(v, computed))
    }

    /// Stored sides equal the recomputed ones and the equation fails.
    fn broken_equation(&self, lhs: Prob, rhs: Prob) -> bool {
        self.w.relation == Relation::Eq
            && self.matches(&self.w.lhs, &lhs)
            && self.matches(&self.w.rhs, &rhs)
            && !self.tol.eq(&lhs, &rhs)
    }

    /// A support witness: μ(T,S) positive when it must vanish, or the reverse.
    fn broken_support(&self, value: Prob, expected_positive: bool) -> bool {
        let relation = if expected_positive { Relation::Gt } else { Relation::Eq };
        self.w.relation == relation
            && self.matches(&self.w.lhs, &value)
            && self.tol.is_supported(&value) != expected_positive
    }

    fn positive(&self, values: &[&Prob]) -> bool {
        values.iter().all(|p| self.tol.is_positive(p))
    }
}

/// Recomputes both sides of `witness` from its bindings. True iff they match
/// the stored values and the demanded relation indeed fails there.
pub fn recheck(scc: &Scc, witness: &Witness, opts: &CheckOptions) -> Result<bool> {
    let v = View {
        scc,
        tol: &opts.tol,
        w: witness,
    };
    let tied = |t: Mask, s: Mask, x: usize| -> Result<Prob> { Ok(v.mu(t, s)? + v.mu(t.with(x), s)?) };
    Ok(match witness.axiom {
        AxiomId::Iis | AxiomId::IisO => {
            let (t, t2, s, s2) = (v.set("T")?, v.set("T'")?, v.set("S")?, v.set("S'")?);
            let vals = [v.mu(t, s)?, v.mu(t2, s)?, v.mu(t, s2)?, v.mu(t2, s2)?];
            let empty_ok = witness.axiom == AxiomId::IisO;
            (empty_ok || (!t.is_empty() && !t2.is_empty()))
                && v.positive(&vals.iter().collect::<Vec<_>>())
                && v.broken_equation(&vals[0] * &vals[3], &vals[1] * &vals[2])
        }
        AxiomId::Singleton => {
            if let (Some(x), Some(y)) = (witness.item("x"), witness.item("y")) {
                let (s, s2) = (v.set("S")?, v.set("S'")?);
                let (a, b) = (Mask::singleton(x), Mask::singleton(y));
                let vals = [v.mu(a, s)?, v.mu(b, s)?, v.mu(a, s2)?, v.mu(b, s2)?];
                v.positive(&vals.iter().collect::<Vec<_>>())
                    && v.broken_equation(&vals[0] * &vals[3], &vals[1] * &vals[2])
            } else {
                let (t, s) = (v.set("T")?, v.set("S")?);
                v.broken_support(v.mu(t, s)?, t.len() == 1)
            }
        }
        AxiomId::RelAdd | AxiomId::RelAdd1 => {
            let (s, x, t, t2) = (v.set("S")?, v.item("x")?, v.set("T")?, v.set("T'")?);
            let rest = s.without(x);
            if witness.axiom == AxiomId::RelAdd1 {
                let q = derive_revealed_constraints(scc, &opts.tol)?;
                let excluded = q[x].intersection(rest);
                if t == excluded || t2 == excluded {
                    return Ok(false);
                }
            }
            let lhs = &v.mu(t, rest)? * &tied(t2, s, x)?;
            let rhs = &v.mu(t2, rest)? * &tied(t, s, x)?;
            v.broken_equation(lhs, rhs)
        }
        AxiomId::RelAdd2 => {
            let (s, x, t, t2) = (v.set("S")?, v.item("x")?, v.set("T")?, v.set("T'")?);
            let q = derive_revealed_constraints(scc, &opts.tol)?;
            let rest = s.without(x);
            if t != q[x].intersection(rest) || t.is_empty() || t2 == t {
                return Ok(false);
            }
            let grand = scc.grand_set();
            let mut total = Prob::zero(scc.mode());
            for y in s.items() {
                total = total + v.mu(q[y], grand)?;
            }
            if opts.tol.is_zero(&total) {
                return Ok(false);
            }
            let adjustment = &v.mu(q[x], grand)? / &total;
            let lhs = &v.mu(t, rest)? * &tied(t2, s, x)?;
            let rhs = &v.mu(t2, rest)? * &(&tied(t, s, x)? - &adjustment);
            v.broken_equation(lhs, rhs)
        }
        AxiomId::Additivity => {
            let (s, x, t) = (v.set("S")?, v.item("x")?, v.set("T")?);
            let rest = s.without(x);
            let lhs = &v.mu(t, rest)? - &v.mu(t, s)?;
            v.broken_equation(lhs, v.mu(t.with(x), s)?)
        }
        AxiomId::Pos1 => {
            let (s, x) = (v.set("S")?, v.item("x")?);
            let mut mass = Prob::zero(scc.mode());
            for t in s.nonempty_subsets().filter(|t| t.contains(x)) {
                mass = mass + v.mu(t, s)?;
            }
            v.broken_support(mass, true)
        }
        AxiomId::Pos2 | AxiomId::Pos4 | AxiomId::Pos3 | AxiomId::FullSupport => {
            let (s, t) = (v.set("S")?, v.set("T")?);
            let expected = match witness.axiom {
                AxiomId::Pos2 => {
                    let attrs = opts
                        .attributes
                        .as_ref()
                        .ok_or(Error::MissingAttributes(AxiomId::Pos2))?;
                    attrs.iter().any(|a| a.intersection(s) == t)
                }
                AxiomId::Pos4 => derive_revealed_nests(scc, &opts.tol)?
                    .iter()
                    .any(|n| n.intersection(s) == t),
                AxiomId::Pos3 => {
                    let q = derive_revealed_constraints(scc, &opts.tol)?;
                    s.items().any(|x| q[x].intersection(s) == t)
                }
                _ => true,
            };
            v.broken_support(v.mu(t, s)?, expected)
        }
        AxiomId::DistinctQ => {
            let (x, y) = (v.item("x")?, v.item("y")?);
            let q = derive_revealed_constraints(scc, &opts.tol)?;
            witness.relation == Relation::Ne
                && witness.lhs == Quantity::Set(q[x])
                && witness.rhs == Quantity::Set(q[y])
                && q[x] == q[y]
        }
        AxiomId::Partition => {
            let nests = derive_revealed_nests(scc, &opts.tol)?;
            if let (Some(a), Some(b)) = (witness.set("N"), witness.set("N'")) {
                let common = a.intersection(b);
                nests.contains(&a)
                    && nests.contains(&b)
                    && a != b
                    && witness.lhs == Quantity::Set(common)
                    && !common.is_empty()
            } else {
                let covered = nests.iter().fold(Mask::EMPTY, |a, b| a.union(*b));
                witness.lhs == Quantity::Set(covered) && covered != scc.grand_set()
            }
        }
        AxiomId::Paf => {
            let (s, x, t) = (v.set("S")?, v.item("x")?, v.set("T")?);
            let rest = s.without(x);
            let (now, before) = (v.mu(t, s)?, v.mu(t, rest)?);
            opts.tol.is_zero(&v.mu(Mask::singleton(x), s)?)
                && v.positive(&[&now, &before])
                && v.broken_equation(now, before)
        }
        AxiomId::DetFullChoice => {
            let s = v.set("S")?;
            v.broken_equation(v.mu(s, s)?, Prob::one(scc.mode()))
        }
        AxiomId::Piis => {
            let (t, t2) = (v.set("T")?, v.set("T'")?);
            let mut values = Vec::new();
            for (star, a, b) in [("T*1", "S1", "S1'"), ("T*2", "S2", "S2'")] {
                let (star, s, s2) = (v.set(star)?, v.set(a)?, v.set(b)?);
                let guards = [v.mu(t, s)?, v.mu(star, s)?, v.mu(star, s2)?, v.mu(t2, s2)?];
                if !v.positive(&guards.iter().collect::<Vec<_>>()) {
                    return Ok(false);
                }
                values.push(chain(|a, b| scc.get(a, b), t, t2, star, s, s2));
            }
            let second = values.pop().unwrap();
            let first = values.pop().unwrap();
            v.broken_equation(first, second)
        }
    })
}
