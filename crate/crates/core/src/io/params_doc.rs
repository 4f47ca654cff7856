//! Parameter documents: a flat JSON object with `model`, `items`, `empty` and
//! the model's own fields. Unknown fields are ignored, so identification
//! output can be fed straight back in.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::models::{
    ArAttribute, ArParams, Attribute, EbaParams, IcParams, LogitParams, ModelParams, ModelSpec,
    ModelTag, NestedLogitParams, NscParams, RcgParams, RrmParams,
};
use crate::primitives::{Mask, Prob, Universe};

use super::scc_doc::check_literal_mix;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

struct Reader<'a> {
    obj: &'a Map<String, Value>,
    universe: &'a Universe,
    literals: Vec<String>,
}

impl<'a> Reader<'a> {
    fn field(&self, name: &str) -> Result<&'a Value> {
        self.obj
            .get(name)
            .ok_or_else(|| schema(format!("missing field `{name}`")))
    }

    fn prob(&mut self, v: &Value, what: &str) -> Result<Prob> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(schema(format!("{what}: probabilities and weights are strings"))),
        };
        let p = Prob::parse(&text)?;
        self.literals.push(text);
        Ok(p)
    }

    fn set(&self, v: &Value, what: &str) -> Result<Mask> {
        let labels = v
            .as_array()
            .ok_or_else(|| schema(format!("{what}: expected a list of labels")))?;
        let labels: Vec<&str> = labels
            .iter()
            .map(|l| l.as_str().ok_or_else(|| schema(format!("{what}: labels are strings"))))
            .collect::<Result<_>>()?;
        self.universe.mask_of(&labels)
    }

    fn array(&self, v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
        v.as_array()
            .ok_or_else(|| schema(format!("`{what}` must be a list")))
    }

    fn object(&self, v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
        v.as_object()
            .ok_or_else(|| schema(format!("`{what}` must be an object")))
    }

    /// `[{"set": [...], "w": "..."}]` into a weight table.
    fn weights(&mut self, name: &str) -> Result<BTreeMap<Mask, Prob>> {
        let mut out = BTreeMap::new();
        for entry in self.array(self.field(name)?, name)? {
            let set = self.set(
                entry.get("set").ok_or_else(|| schema(format!("{name}: entry lacks `set`")))?,
                name,
            )?;
            let w = self.prob(
                entry.get("w").ok_or_else(|| schema(format!("{name}: entry lacks `w`")))?,
                name,
            )?;
            if out.insert(set, w).is_some() {
                return Err(schema(format!("{name}: set {} listed twice", self.universe.format_set(set))));
            }
        }
        Ok(out)
    }

    /// `{"label": "..."}` into a per-item vector; every item must appear.
    fn per_item(&mut self, name: &str) -> Result<Vec<Prob>> {
        let obj = self.object(self.field(name)?, name)?;
        let mut out: Vec<Option<Prob>> = vec![None; self.universe.len()];
        for (label, v) in obj {
            let i = self.universe.index_of(label)?;
            out[i] = Some(self.prob(v, name)?);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| schema(format!("{name}: no value for `{}`", self.universe.label(i))))
            })
            .collect()
    }

    fn nests(&self) -> Result<Vec<Mask>> {
        self.array(self.field("nests")?, "nests")?
            .iter()
            .map(|n| self.set(n, "nests"))
            .collect()
    }
}

/// Parses a parameter document into a spec and its universe.
pub fn parse_params(text: &str) -> Result<(ModelSpec, Universe)> {
    let value: Value = serde_json::from_str(text)?;
    parse_params_value(&value)
}

pub fn parse_params_value(value: &Value) -> Result<(ModelSpec, Universe)> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema("a parameter document is a JSON object"))?;
    let items = obj
        .get("items")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("missing field `items`"))?;
    let labels: Vec<String> = items
        .iter()
        .map(|l| l.as_str().map(str::to_string).ok_or_else(|| schema("labels are strings")))
        .collect::<Result<_>>()?;
    let universe = Universe::new(labels)?;
    let model: ModelTag = obj
        .get("model")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("missing field `model`"))?
        .parse()?;
    let empty = match obj.get("empty") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(schema("`empty` must be a boolean")),
    };
    let mut r = Reader {
        obj,
        universe: &universe,
        literals: Vec::new(),
    };
    let params = match model {
        ModelTag::Logit => {
            let pi = r.weights("pi")?;
            let pi_empty = match obj.get("pi_empty") {
                None | Some(Value::Null) => None,
                Some(v) => Some(r.prob(v, "pi_empty")?),
            };
            ModelParams::Logit(LogitParams { pi, pi_empty })
        }
        ModelTag::Rcg => ModelParams::Rcg(RcgParams { m: r.weights("m")? }),
        ModelTag::Ic => ModelParams::Ic(IcParams {
            gamma: r.per_item("gamma")?,
        }),
        ModelTag::Eba => {
            let mut attributes = Vec::new();
            for a in r.array(r.field("attributes")?, "attributes")? {
                let weight = r.prob(a.get("weight").ok_or_else(|| schema("attribute lacks `weight`"))?, "weight")?;
                let carrier = r.set(a.get("set").ok_or_else(|| schema("attribute lacks `set`"))?, "set")?;
                attributes.push(Attribute { weight, carrier });
            }
            ModelParams::Eba(EbaParams { attributes })
        }
        ModelTag::Ar => {
            let mut attributes = Vec::new();
            for a in r.array(r.field("attributes")?, "attributes")? {
                let theta = r.prob(a.get("theta").ok_or_else(|| schema("attribute lacks `theta`"))?, "theta")?;
                let carrier = r.set(a.get("set").ok_or_else(|| schema("attribute lacks `set`"))?, "set")?;
                let eta_obj = r.object(a.get("eta").ok_or_else(|| schema("attribute lacks `eta`"))?, "eta")?;
                let mut eta = BTreeMap::new();
                for (label, v) in eta_obj {
                    let k = v
                        .as_u64()
                        .ok_or_else(|| schema("`eta` values are positive integers"))?;
                    eta.insert(universe.index_of(label)?, k);
                }
                attributes.push(ArAttribute { theta, carrier, eta });
            }
            ModelParams::Ar(ArParams { attributes })
        }
        ModelTag::Rrm => {
            let salience = r.per_item("salience")?;
            let obj_q = r.object(r.field("constraints")?, "constraints")?;
            let mut constraints = vec![None; universe.len()];
            for (label, v) in obj_q {
                constraints[universe.index_of(label)?] = Some(r.set(v, "constraints")?);
            }
            let constraints = constraints
                .into_iter()
                .enumerate()
                .map(|(i, q)| q.ok_or_else(|| schema(format!("constraints: no set for `{}`", universe.label(i)))))
                .collect::<Result<_>>()?;
            ModelParams::Rrm(RrmParams {
                salience,
                constraints,
            })
        }
        ModelTag::Nsc => ModelParams::Nsc(NscParams {
            nests: r.nests()?,
            sigma: r.weights("sigma")?,
        }),
        ModelTag::NestedLogit => {
            let nests = r.nests()?;
            let utility = r.per_item("v")?;
            let exponents = r
                .array(r.field("eta")?, "eta")?
                .iter()
                .map(|v| r.prob(v, "eta"))
                .collect::<Result<Vec<_>>>();
            // Exponents are not probabilities; keep them out of the mode check.
            let literals = std::mem::take(&mut r.literals);
            let exponents = exponents?;
            let n_exp = exponents.len();
            r.literals = literals[..literals.len() - n_exp].to_vec();
            ModelParams::NestedLogit(NestedLogitParams {
                nests,
                utility,
                exponents,
            })
        }
    };
    check_literal_mix(r.literals.iter().map(String::as_str))?;
    let spec = ModelSpec::new(params, empty)?;
    spec.validate(universe.len())?;
    Ok((spec, universe))
}

fn labels(u: &Universe, m: Mask) -> Value {
    json!(u.labels_of(m))
}

fn weight_list(u: &Universe, table: &BTreeMap<Mask, Prob>) -> Value {
    Value::Array(
        table
            .iter()
            .map(|(t, w)| json!({"set": labels(u, *t), "w": w.to_string()}))
            .collect(),
    )
}

fn per_item(u: &Universe, values: &[Prob]) -> Value {
    let mut m = Map::new();
    for (i, v) in values.iter().enumerate() {
        m.insert(u.label(i).to_string(), json!(v.to_string()));
    }
    Value::Object(m)
}

/// The document for `spec`, keys sorted.
pub fn params_to_value(spec: &ModelSpec, u: &Universe) -> Value {
    let mut obj = Map::new();
    obj.insert("model".into(), json!(spec.tag().name()));
    obj.insert("items".into(), json!(u.labels()));
    obj.insert("empty".into(), json!(spec.empty_variant));
    match &spec.params {
        ModelParams::Logit(p) => {
            obj.insert("pi".into(), weight_list(u, &p.pi));
            if let Some(w) = &p.pi_empty {
                obj.insert("pi_empty".into(), json!(w.to_string()));
            }
        }
        ModelParams::Rcg(p) => {
            obj.insert("m".into(), weight_list(u, &p.m));
        }
        ModelParams::Ic(p) => {
            obj.insert("gamma".into(), per_item(u, &p.gamma));
        }
        ModelParams::Eba(p) => {
            let attrs = p
                .attributes
                .iter()
                .map(|a| json!({"weight": a.weight.to_string(), "set": labels(u, a.carrier)}))
                .collect();
            obj.insert("attributes".into(), Value::Array(attrs));
        }
        ModelParams::Ar(p) => {
            let attrs = p
                .attributes
                .iter()
                .map(|a| {
                    let eta: Map<String, Value> = a
                        .eta
                        .iter()
                        .map(|(i, k)| (u.label(*i).to_string(), json!(k)))
                        .collect();
                    json!({"theta": a.theta.to_string(), "set": labels(u, a.carrier), "eta": eta})
                })
                .collect();
            obj.insert("attributes".into(), Value::Array(attrs));
        }
        ModelParams::Rrm(p) => {
            obj.insert("salience".into(), per_item(u, &p.salience));
            let q: Map<String, Value> = p
                .constraints
                .iter()
                .enumerate()
                .map(|(i, c)| (u.label(i).to_string(), labels(u, *c)))
                .collect();
            obj.insert("constraints".into(), Value::Object(q));
        }
        ModelParams::Nsc(p) => {
            let nests = p.nests.iter().map(|n| labels(u, *n)).collect();
            obj.insert("nests".into(), Value::Array(nests));
            obj.insert("sigma".into(), weight_list(u, &p.sigma));
        }
        ModelParams::NestedLogit(p) => {
            let nests = p.nests.iter().map(|n| labels(u, *n)).collect();
            obj.insert("nests".into(), Value::Array(nests));
            obj.insert("v".into(), per_item(u, &p.utility));
            let eta = p.exponents.iter().map(|e| json!(e.to_string())).collect();
            obj.insert("eta".into(), Value::Array(eta));
        }
    }
    Value::Object(obj)
}

pub fn serialize_params(spec: &ModelSpec, u: &Universe) -> String {
    serde_json::to_string_pretty(&params_to_value(spec, u)).expect("parameter documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::generate_scc;

    #[test]
    fn nsc_document_round_trip() {
        let text = r#"{
            "model": "nsc", "items": ["a", "b", "c"],
            "nests": [["a", "b"], ["c"]],
            "sigma": [
                {"set": ["a"], "w": "1"}, {"set": ["b"], "w": "2"},
                {"set": ["a", "b"], "w": "4"}, {"set": ["c"], "w": "3"}
            ]
        }"#;
        let (spec, u) = parse_params(text).unwrap();
        assert_eq!(spec.tag(), ModelTag::Nsc);
        let again = parse_params(&serialize_params(&spec, &u)).unwrap();
        assert_eq!(again.0, spec);
        let scc = generate_scc(&spec, &u).unwrap();
        assert_eq!(scc.lookup(Mask(0b011), Mask(0b111)).unwrap(), Prob::ratio(4, 7));
    }

    #[test]
    fn every_model_round_trips() {
        let docs = [
            r#"{"model":"logit","items":["a","b"],"pi":[{"set":["a"],"w":"2"},{"set":["b"],"w":"1"},{"set":["a","b"],"w":"1"}]}"#,
            r#"{"model":"logit","items":["a"],"empty":true,"pi":[{"set":["a"],"w":"1"}],"pi_empty":"1"}"#,
            r#"{"model":"rcg","items":["a","b","c"],"m":[{"set":["a","b"],"w":"1/2"},{"set":["c"],"w":"1/4"},{"set":["a","b","c"],"w":"1/4"}]}"#,
            r#"{"model":"ic","items":["a","b"],"gamma":{"a":"1/2","b":"1/3"}}"#,
            r#"{"model":"eba","items":["a","b","c"],"attributes":[{"weight":"3/5","set":["a","b"]},{"weight":"2/5","set":["c"]}]}"#,
            r#"{"model":"ar","items":["a","b","c"],"attributes":[{"theta":"1","set":["a","b"],"eta":{"a":1,"b":2}},{"theta":"1","set":["c"],"eta":{"c":1}}]}"#,
            r#"{"model":"rrm","items":["x","y"],"salience":{"x":"1","y":"1"},"constraints":{"x":["x","y"],"y":["y"]}}"#,
            r#"{"model":"nested_logit","items":["a","b","c"],"nests":[["a","b"],["c"]],"v":{"a":"1","b":"1","c":"3"},"eta":["2","1"]}"#,
        ];
        for d in docs {
            let (spec, u) = parse_params(d).unwrap();
            let text = serialize_params(&spec, &u);
            let (again, u2) = parse_params(&text).unwrap();
            assert_eq!(again, spec, "{d}");
            assert_eq!(u2, u);
        }
    }

    #[test]
    fn rejects_mixed_literals_and_missing_fields() {
        let mixed = r#"{"model":"ic","items":["a","b"],"gamma":{"a":"1/2","b":"0.3"}}"#;
        assert!(matches!(parse_params(mixed), Err(Error::Schema(_))));
        let missing = r#"{"model":"ic","items":["a","b"],"gamma":{"a":"1/2"}}"#;
        assert!(parse_params(missing).is_err());
        let bad_variant = r#"{"model":"rrm","items":["x"],"empty":true,"salience":{"x":"1"},"constraints":{"x":["x"]}}"#;
        assert!(matches!(parse_params(bad_variant), Err(Error::InvalidParams(_))));
    }
}
