//! Machine-readable reports. Every document is built as a `serde_json::Value`,
//! whose maps keep keys sorted, so identical inputs print identically.

use serde_json::{json, Map, Value};

use crate::axioms::{AxiomReport, Binding, Quantity, Witness};
use crate::classify::ClassificationReport;
use crate::identify::RecoveryResult;
use crate::primitives::Universe;

use super::params_doc::params_to_value;

fn quantity(u: &Universe, q: &Quantity) -> Value {
    match q {
        Quantity::Value(p) => json!(p.to_string()),
        Quantity::Set(m) => json!(u.labels_of(*m)),
    }
}

pub fn witness_to_value(w: &Witness, u: &Universe) -> Value {
    let bindings: Map<String, Value> = w
        .bindings
        .iter()
        .map(|(name, b)| {
            let v = match b {
                Binding::Set(m) => json!(u.labels_of(*m)),
                Binding::Item(x) => json!(u.label(*x)),
            };
            (name.to_string(), v)
        })
        .collect();
    json!({
        "bindings": bindings,
        "relation": w.relation,
        "lhs": quantity(u, &w.lhs),
        "rhs": quantity(u, &w.rhs),
    })
}

/// `{"axiom", "holds", "witnesses", "instances_checked", "instances_vacuous", "mode"}`.
pub fn report_to_value(r: &AxiomReport, u: &Universe) -> Value {
    json!({
        "axiom": r.axiom,
        "holds": r.holds,
        "witnesses": r.witnesses.iter().map(|w| witness_to_value(w, u)).collect::<Vec<_>>(),
        "instances_checked": r.instances_checked,
        "instances_vacuous": r.instances_vacuous,
        "mode": r.mode,
    })
}

pub fn classification_to_value(r: &ClassificationReport) -> Value {
    serde_json::to_value(r).expect("classification reports always serialize")
}

/// The parameter document of the recovered spec, plus the round-trip verdicts
/// and the normalization note. Loadable by `parse_params`.
pub fn recovery_to_value(r: &RecoveryResult, u: &Universe) -> Value {
    let mut v = params_to_value(&r.spec, u);
    let obj = v.as_object_mut().expect("parameter documents are objects");
    obj.insert("round_trip_exact".into(), json!(r.round_trip_exact));
    obj.insert("round_trip_within_tolerance".into(), json!(r.round_trip_within_tolerance));
    obj.insert("normalization_note".into(), json!(r.normalization_note));
    v
}

/// Pretty-printed with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
