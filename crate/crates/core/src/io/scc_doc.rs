use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{literal_kind, LiteralKind, Mask, Prob, Row, Scc, ToleranceConfig, Universe};

#[derive(Debug, Serialize, Deserialize)]
struct SccDocument {
    allows_empty: bool,
    items: Vec<String>,
    menus: Vec<MenuEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MenuEntry {
    menu: Vec<String>,
    rows: Vec<RowEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RowEntry {
    p: String,
    set: Vec<String>,
}

/// Checks that the probability literals do not mix exact and decimal forms.
pub(crate) fn check_literal_mix<'a>(literals: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut rational = None;
    let mut decimal = None;
    for l in literals {
        match literal_kind(l) {
            LiteralKind::Rational => rational = rational.or(Some(l)),
            LiteralKind::Decimal => decimal = decimal.or(Some(l)),
            LiteralKind::Integer => {}
        }
    }
    if let (Some(r), Some(d)) = (rational, decimal) {
        return Err(Error::Schema(format!(
            "mixed probability formats: `{r}` is exact but `{d}` is decimal"
        )));
    }
    Ok(())
}

/// Parses and validates a dataset document.
pub fn parse_scc(text: &str) -> Result<Scc> {
    parse_scc_with(text, &ToleranceConfig::default())
}

pub fn parse_scc_with(text: &str, tol: &ToleranceConfig) -> Result<Scc> {
    let doc: SccDocument = serde_json::from_str(text)?;
    let universe = Universe::new(doc.items.iter().cloned())?;
    check_literal_mix(doc.menus.iter().flat_map(|m| m.rows.iter().map(|r| r.p.as_str())))?;
    let mut rows: BTreeMap<Mask, Row> = BTreeMap::new();
    let mut seen: BTreeSet<(Mask, Mask)> = BTreeSet::new();
    for entry in &doc.menus {
        let menu = universe.mask_of(&entry.menu)?;
        if menu.is_empty() {
            return Err(Error::Schema("a menu must list at least one item".into()));
        }
        let row = rows.entry(menu).or_default();
        for r in &entry.rows {
            let set = universe.mask_of(&r.set)?;
            if !seen.insert((menu, set)) {
                return Err(Error::Schema(format!(
                    "duplicate row for set {} in menu {}",
                    universe.format_set(set),
                    universe.format_set(menu)
                )));
            }
            let p = Prob::parse(&r.p)?;
            if !p.is_exact_zero() {
                row.insert(set, p);
            }
        }
    }
    let scc = Scc::new(universe, doc.allows_empty, rows)?;
    let violations = scc.validate(tol);
    if !violations.is_empty() {
        let u = scc.universe();
        let detail: Vec<String> = violations
            .iter()
            .map(|v| format!("menu {}: {}", u.format_set(v.menu), v.detail))
            .collect();
        return Err(Error::Validation(detail.join("; ")));
    }
    Ok(scc)
}

/// Canonical document: menus and rows in numeric mask order, zero rows omitted.
pub fn serialize_scc(scc: &Scc) -> String {
    let u = scc.universe();
    let doc = SccDocument {
        allows_empty: scc.allows_empty(),
        items: u.labels().to_vec(),
        menus: scc
            .rows()
            .iter()
            .map(|(menu, row)| MenuEntry {
                menu: u.labels_of(*menu),
                rows: row
                    .iter()
                    .filter(|(_, p)| !p.is_exact_zero())
                    .map(|(set, p)| RowEntry {
                        p: p.to_string(),
                        set: u.labels_of(*set),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("dataset documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_TWO: &str = r#"{
        "items": ["x", "y"],
        "allows_empty": false,
        "menus": [
            {"menu": ["x"], "rows": [{"set": ["x"], "p": "1"}]},
            {"menu": ["y"], "rows": [{"set": ["y"], "p": "1"}]},
            {"menu": ["x", "y"], "rows": [
                {"set": ["x", "y"], "p": "1/2"},
                {"set": ["y"], "p": "1/2"},
                {"set": ["x"], "p": "0"}
            ]}
        ]
    }"#;

    #[test]
    fn parses_exact_document() {
        let scc = parse_scc(TABLE_TWO).unwrap();
        assert_eq!(scc.mode(), crate::primitives::Mode::Exact);
        assert_eq!(scc.lookup(Mask(0b11), Mask(0b11)).unwrap(), Prob::ratio(1, 2));
        assert_eq!(scc.lookup(Mask(0b01), Mask(0b11)).unwrap(), Prob::int(0));
    }

    #[test]
    fn round_trip_is_identity_on_canonical_text() {
        let scc = parse_scc(TABLE_TWO).unwrap();
        let text = serialize_scc(&scc);
        let again = parse_scc(&text).unwrap();
        assert_eq!(again, scc);
        assert_eq!(serialize_scc(&again), text);
    }

    #[test]
    fn rejects_mixed_formats_and_bad_sums() {
        let mixed = TABLE_TWO.replacen("\"1/2\"", "\"0.5\"", 1);
        assert!(matches!(parse_scc(&mixed), Err(Error::Schema(_))));
        let short = TABLE_TWO.replacen("\"1/2\"", "\"2/5\"", 1);
        assert!(matches!(parse_scc(&short), Err(Error::Validation(_))));
        let dup = TABLE_TWO.replace("{\"set\": [\"x\"], \"p\": \"0\"}", "{\"set\": [\"y\"], \"p\": \"0\"}");
        assert!(matches!(parse_scc(&dup), Err(Error::Schema(_))));
        let unknown = TABLE_TWO.replacen("[\"x\"], \"rows\"", "[\"z\"], \"rows\"", 1);
        assert!(matches!(parse_scc(&unknown), Err(Error::UnknownLabel(_))));
    }
}
