mod common;

use std::collections::BTreeMap;

use common::*;
use scclab::axioms::CheckOptions;
use scclab::classify::{self, classify, verify_relationships, Membership};
use scclab::{Mask, Prob, Scc};

fn run(scc: &Scc) -> classify::ClassificationReport {
    classify(scc, &CheckOptions::default()).unwrap()
}

#[test]
fn nsc_example_is_nsc_only() {
    let r = run(&scc_of(&nsc_example(), 3));
    assert_eq!(r.holds(classify::NSC), Some(true));
    assert_eq!(r.holds(classify::LOGIT), Some(false));
    assert_eq!(r.holds(classify::IC), Some(false));
    assert_eq!(r.holds(classify::RCG), Some(false));
    assert!(r.relationship_violations.is_empty());
}

#[test]
fn ic_example_is_logit_and_rcg() {
    let r = run(&scc_of(&ic_example(), 2));
    for class in [classify::IC, classify::LOGIT, classify::RCG] {
        assert_eq!(r.holds(class), Some(true), "{class}");
    }
    assert!(!r.assumption_flags.is_empty());
}

#[test]
fn deterministic_full_choice_is_flagged() {
    let u = letters(3);
    let rows = u.menus().map(|s| (s, BTreeMap::from([(s, Prob::int(1))]))).collect();
    let r = run(&Scc::new(u, false, rows).unwrap());
    assert!(r.special["DET_FULL_CHOICE"]);
    assert_eq!(r.holds(classify::RCG), Some(true));
    assert_eq!(r.holds(classify::NESTED_LOGIT), Some(true));
    assert!(r.relationship_violations.is_empty());
}

#[test]
fn singleton_weights_give_singleton_flag() {
    let u = letters(3);
    let w = [1i64, 2, 3];
    let rows = u
        .menus()
        .map(|s| {
            let total: i64 = s.items().map(|x| w[x]).sum();
            (s, s.items().map(|x| (Mask::singleton(x), q(w[x], total))).collect())
        })
        .collect();
    let r = run(&Scc::new(u, false, rows).unwrap());
    assert!(r.special["SINGLETON"]);
    for class in [classify::RCG, classify::RRM, classify::NSC, classify::NESTED_LOGIT] {
        assert_eq!(r.holds(class), Some(true), "{class}");
    }
    assert!(r.relationship_violations.is_empty());
}

#[test]
fn hand_built_inconsistent_reports_are_named() {
    let mut r = run(&scc_of(&rcg_example(), 3));
    r.membership.insert(classify::LOGIT, Membership::Holds);
    r.membership.insert(classify::RCG, Membership::Holds);
    r.membership.insert(classify::IC, Membership::Fails { failing: vec![] });
    assert!(verify_relationships(&r).iter().any(|v| v == "ic-equals-logit-and-rcg"));

    let mut r = run(&scc_of(&nsc_example(), 3));
    r.membership.insert(classify::RRM, Membership::Holds);
    r.membership.insert(classify::LOGIT, Membership::Holds);
    assert!(verify_relationships(&r).iter().any(|v| v == "rrm-or-nsc-excludes-logit-and-ic"));
}

#[test]
fn classification_is_deterministic() {
    let scc = scc_of(&eba_example(), 3);
    assert_eq!(run(&scc), run(&scc));
}
