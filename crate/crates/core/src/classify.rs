//! Model-class membership from the axiom battery, and consistency of the
//! resulting verdicts with the known inclusions between the classes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::axioms::{applicable_axioms, check_many, AxiomId, AxiomReport, CheckOptions};
use crate::error::Result;
use crate::primitives::Scc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    Holds,
    Fails { failing: Vec<AxiomId> },
    NotApplicable,
    NotDecided,
}

impl Membership {
    /// `Some(true/false)` for decided verdicts.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Membership::Holds => Some(true),
            Membership::Fails { .. } => Some(false),
            _ => None,
        }
    }
}

pub const LOGIT: &str = "logit";
pub const RCG: &str = "rcg";
pub const EBA_ENDOGENOUS: &str = "eba_endogenous";
pub const EBA_EXOGENOUS: &str = "eba_exogenous";
pub const AR: &str = "ar";
pub const IC: &str = "ic";
pub const RRM: &str = "rrm";
pub const NSC: &str = "nsc";
pub const NESTED_LOGIT: &str = "nested_logit";
pub const LOGIT_O: &str = "logit_o";
pub const RCG_O: &str = "rcg_o";
pub const IC_O: &str = "ic_o";

pub const NEST_INVARIANT: &str = "NEST_INVARIANT";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub allows_empty: bool,
    pub membership: BTreeMap<&'static str, Membership>,
    /// DET_FULL_CHOICE, SINGLETON, PAF and NEST_INVARIANT (NSC together with PAF).
    pub special: BTreeMap<&'static str, bool>,
    /// Verdict of every axiom that was run.
    pub axioms: BTreeMap<AxiomId, bool>,
    pub relationship_violations: Vec<String>,
    pub assumption_flags: Vec<String>,
}

impl ClassificationReport {
    pub fn holds(&self, class: &str) -> Option<bool> {
        self.membership.get(class).and_then(Membership::decided)
    }
}

fn verdict(holds: &BTreeMap<AxiomId, bool>, needed: &[AxiomId]) -> Membership {
    let failing: Vec<AxiomId> = needed.iter().copied().filter(|a| !holds[a]).collect();
    if failing.is_empty() {
        Membership::Holds
    } else {
        Membership::Fails { failing }
    }
}

/// Runs the battery and decides every class.
pub fn classify(scc: &Scc, opts: &CheckOptions) -> Result<ClassificationReport> {
    let axioms = applicable_axioms(scc, opts);
    let reports = check_many(scc, &axioms, opts)?;
    Ok(classify_from_reports(scc, opts.attributes.is_some(), &reports))
}

pub fn classify_from_reports(scc: &Scc, with_attributes: bool, reports: &[AxiomReport]) -> ClassificationReport {
    use AxiomId::*;
    let holds: BTreeMap<AxiomId, bool> = reports.iter().map(|r| (r.axiom, r.holds)).collect();
    let n = scc.n();
    let mut membership = BTreeMap::new();
    let mut special = BTreeMap::new();
    let standard = [LOGIT, RCG, EBA_ENDOGENOUS, EBA_EXOGENOUS, AR, IC, RRM, NSC, NESTED_LOGIT];
    let with_empty = [LOGIT_O, RCG_O, IC_O];

    if scc.allows_empty() {
        for class in standard {
            membership.insert(class, Membership::NotApplicable);
        }
        membership.insert(LOGIT_O, verdict(&holds, &[FullSupport, IisO]));
        membership.insert(RCG_O, verdict(&holds, &[Additivity]));
        membership.insert(IC_O, verdict(&holds, &[FullSupport, IisO, Additivity]));
    } else {
        for class in with_empty {
            membership.insert(class, Membership::NotApplicable);
        }
        let rcg = verdict(&holds, &[Pos1, RelAdd]);
        let rrm = verdict(&holds, &[DistinctQ, Pos3, RelAdd1, RelAdd2]);
        let nsc = verdict(&holds, &[Piis, Partition, Pos4]);
        membership.insert(LOGIT, verdict(&holds, &[FullSupport, Iis]));
        membership.insert(IC, verdict(&holds, &[FullSupport, Iis, RelAdd]));
        membership.insert(
            EBA_EXOGENOUS,
            if with_attributes {
                verdict(&holds, &[Pos2, RelAdd])
            } else {
                Membership::NotApplicable
            },
        );
        let singleton = holds[&Singleton];
        let full_choice = holds[&DetFullChoice];
        // A single nest reproduces deterministic full choice whatever v and η are.
        let nested_logit = if singleton || full_choice {
            Membership::Holds
        } else if let Membership::Fails { failing } = &nsc {
            Membership::Fails {
                failing: failing.clone(),
            }
        } else if n >= 3 && (rcg == Membership::Holds || rrm == Membership::Holds) {
            // With two or more nests, nested logit meets RCG and RRM only in
            // the singleton case.
            Membership::Fails {
                failing: vec![Singleton],
            }
        } else {
            Membership::NotDecided
        };
        membership.insert(NESTED_LOGIT, nested_logit);
        special.insert(DetFullChoice.name(), full_choice);
        special.insert(Singleton.name(), singleton);
        special.insert(Paf.name(), holds[&Paf]);
        special.insert(NEST_INVARIANT, nsc == Membership::Holds && holds[&Paf]);
        membership.insert(RCG, rcg.clone());
        membership.insert(EBA_ENDOGENOUS, rcg.clone());
        membership.insert(AR, rcg);
        membership.insert(RRM, rrm);
        membership.insert(NSC, nsc);
    }

    let mut report = ClassificationReport {
        n,
        allows_empty: scc.allows_empty(),
        membership,
        special,
        axioms: holds,
        relationship_violations: Vec::new(),
        assumption_flags: Vec::new(),
    };
    let violations = verify_relationships(&report);
    if n < 3 {
        let mut flag = "n < 3: the characterizations and class relationships assume at least three items; relationship checks not enforced".to_string();
        if !violations.is_empty() {
            flag.push_str(&format!(" (would flag: {})", violations.join(", ")));
        }
        report.assumption_flags.push(flag);
    } else {
        report.relationship_violations = violations;
    }
    report
}

/// Names every inclusion the membership vector contradicts. Undecided or
/// inapplicable verdicts leave the relationships that mention them unchecked.
pub fn verify_relationships(report: &ClassificationReport) -> Vec<String> {
    let class = |c: &str| report.holds(c);
    let flag = |f: &str| report.special.get(f).copied();
    let and = |a: Option<bool>, b: Option<bool>| match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    };
    let or = |a: Option<bool>, b: Option<bool>| match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    };
    let iff = |a: Option<bool>, b: Option<bool>| match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    };
    let mut out = Vec::new();
    let mut expect = |ok: bool, name: &str| {
        if !ok {
            out.push(name.to_string());
        }
    };

    if report.allows_empty {
        expect(
            iff(class(IC_O), and(class(LOGIT_O), class(RCG_O))),
            "ic-o-equals-logit-o-and-rcg-o",
        );
        return out;
    }
    let singleton = flag(AxiomId::Singleton.name());
    let nest_invariant = flag(NEST_INVARIANT);
    let paf = flag(AxiomId::Paf.name());
    expect(iff(class(IC), and(class(LOGIT), class(RCG))), "ic-equals-logit-and-rcg");
    expect(iff(and(class(RRM), class(RCG)), singleton), "rrm-and-rcg-iff-singleton");
    expect(iff(and(class(RRM), class(NSC)), singleton), "rrm-and-nsc-iff-singleton");
    expect(
        iff(and(class(NSC), class(RCG)), nest_invariant),
        "nsc-and-rcg-iff-nest-invariant",
    );
    expect(
        iff(and(class(NSC), paf), nest_invariant),
        "nsc-and-paf-iff-nest-invariant",
    );
    let structured = or(class(RRM), class(NSC));
    let luce_like = or(class(LOGIT), class(IC));
    expect(
        !(structured == Some(true) && luce_like == Some(true)),
        "rrm-or-nsc-excludes-logit-and-ic",
    );
    expect(
        iff(and(class(NESTED_LOGIT), class(RRM)), singleton),
        "nested-logit-and-rrm-iff-singleton",
    );
    expect(
        iff(
            and(class(NESTED_LOGIT), class(RCG)),
            or(singleton, flag(AxiomId::DetFullChoice.name())),
        ),
        "nested-logit-and-rcg-iff-singleton-or-full-choice",
    );
    expect(iff(class(EBA_ENDOGENOUS), class(RCG)), "endogenous-eba-equals-rcg");
    expect(iff(class(AR), class(EBA_ENDOGENOUS)), "ar-equals-endogenous-eba");
    out
}
