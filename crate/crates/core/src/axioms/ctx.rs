use crate::error::Result;
use crate::primitives::{Mask, Prob, Scc, Table, ToleranceConfig};

use super::{AxiomId, AxiomReport, Binding, CheckOptions, Quantity, Relation, Witness};

/// Dense view of a complete dataset plus the comparison settings.
pub(crate) struct Ctx<'a> {
    pub scc: &'a Scc,
    pub table: Table,
    pub tol: &'a ToleranceConfig,
    pub cap: usize,
}

impl<'a> Ctx<'a> {
    pub fn new(scc: &'a Scc, opts: &'a CheckOptions) -> Result<Ctx<'a>> {
        scc.require_complete()?;
        Ok(Ctx {
            scc,
            table: Table::new(scc),
            tol: &opts.tol,
            cap: opts.witness_cap,
        })
    }

    #[inline]
    pub fn mu(&self, t: Mask, s: Mask) -> &Prob {
        self.table.get(t, s)
    }

    pub fn grand(&self) -> Mask {
        self.scc.grand_set()
    }

    pub fn zero(&self, p: &Prob) -> bool {
        self.tol.is_zero(p)
    }

    pub fn supported(&self, p: &Prob) -> bool {
        self.tol.is_supported(p)
    }

    pub fn eq(&self, a: &Prob, b: &Prob) -> bool {
        self.tol.eq(a, b)
    }

    pub fn acc(&self, axiom: AxiomId) -> Acc {
        Acc {
            axiom,
            cap: self.cap,
            witnesses: Vec::new(),
            violations: 0,
            checked: 0,
            vacuous: 0,
        }
    }
}

/// Running tally for one check.
pub(crate) struct Acc {
    axiom: AxiomId,
    cap: usize,
    witnesses: Vec<Witness>,
    violations: usize,
    pub checked: u64,
    pub vacuous: u64,
}

impl Acc {
    pub fn fail(
        &mut self,
        bindings: Vec<(&'static str, Binding)>,
        relation: Relation,
        lhs: Quantity,
        rhs: Quantity,
    ) {
        self.violations += 1;
        if self.witnesses.len() < self.cap {
            self.witnesses.push(Witness {
                axiom: self.axiom,
                bindings,
                relation,
                lhs,
                rhs,
            });
        }
    }

    pub fn fail_values(
        &mut self,
        bindings: Vec<(&'static str, Binding)>,
        relation: Relation,
        lhs: Prob,
        rhs: Prob,
    ) {
        self.fail(bindings, relation, Quantity::Value(lhs), Quantity::Value(rhs));
    }

    pub fn finish(self, ctx: &Ctx) -> AxiomReport {
        AxiomReport {
            axiom: self.axiom,
            holds: self.violations == 0,
            witnesses: self.witnesses,
            violations: self.violations,
            instances_checked: self.checked,
            instances_vacuous: self.vacuous,
            mode: ctx.table.mode(),
        }
    }
}

pub(crate) fn set(m: Mask) -> Binding {
    Binding::Set(m)
}

pub(crate) fn item(i: usize) -> Binding {
    Binding::Item(i)
}
