//! Empirical datasets from choice counts.
//!
//! The table is `;`-separated with header `menu;set;count`. Menus and sets are
//! comma-separated label lists; an empty `set` records the empty collection and
//! marks the dataset as allowing it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::primitives::{Mask, Prob, Row, Scc, Universe};

#[derive(Debug, Deserialize)]
struct Record {
    menu: String,
    set: String,
    count: u64,
}

fn split(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|l| !l.is_empty()).collect()
}

/// Counts keyed by (menu, collection).
pub type CountsTable = BTreeMap<(Mask, Mask), u64>;

/// Parses the table into its universe and summed counts. The universe is the
/// set of labels seen, sorted.
pub fn parse_counts(text: &str) -> Result<(Universe, CountsTable)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let records: Vec<Record> = reader.deserialize().collect::<std::result::Result<_, _>>()?;
    let labels: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| split(&r.menu).into_iter().chain(split(&r.set)))
        .collect();
    let universe = Universe::new(labels)?;
    let mut table = CountsTable::new();
    for r in &records {
        let menu = universe.mask_of(&split(&r.menu))?;
        let set = universe.mask_of(&split(&r.set))?;
        if menu.is_empty() {
            return Err(Error::Schema("a menu must list at least one item".into()));
        }
        if !set.is_subset_of(menu) {
            return Err(Error::Schema(format!(
                "set {} is not contained in menu {}",
                universe.format_set(set),
                universe.format_set(menu)
            )));
        }
        *table.entry((menu, set)).or_insert(0) += r.count;
    }
    Ok((universe, table))
}

/// μ̂(T,S) = count(T,S) / Σ count(·,S), in float mode. Menus absent from the
/// table stay absent from the dataset.
pub fn estimate_from_counts(text: &str) -> Result<Scc> {
    let (universe, table) = parse_counts(text)?;
    estimate_from_table(universe, &table)
}

pub fn estimate_from_table(universe: Universe, table: &CountsTable) -> Result<Scc> {
    let mut totals: BTreeMap<Mask, u64> = BTreeMap::new();
    for ((menu, _), c) in table {
        *totals.entry(*menu).or_insert(0) += c;
    }
    if let Some((menu, _)) = totals.iter().find(|(_, t)| **t == 0) {
        return Err(Error::ZeroTotal(*menu));
    }
    let allows_empty = table.keys().any(|(_, set)| set.is_empty());
    let mut rows: BTreeMap<Mask, Row> = BTreeMap::new();
    for ((menu, set), c) in table {
        let row = rows.entry(*menu).or_default();
        if *c > 0 {
            row.insert(*set, Prob::float(*c as f64 / totals[menu] as f64));
        }
    }
    Scc::new(universe, allows_empty, rows)
}

/// Writes a table in the same format, rows in numeric mask order.
pub fn write_counts(universe: &Universe, table: &CountsTable) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().delimiter(b';').from_writer(Vec::new());
    writer.write_record(["menu", "set", "count"])?;
    for ((menu, set), c) in table {
        writer.write_record([
            universe.labels_of(*menu).join(","),
            universe.labels_of(*set).join(","),
            c.to_string(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("labels are UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies_per_menu() {
        let text = "menu;set;count\na,b;a;50\na,b;b;25\na,b;a,b;25\n";
        let scc = estimate_from_counts(text).unwrap();
        let ab = Mask(0b11);
        assert_eq!(scc.lookup(Mask(0b01), ab).unwrap(), Prob::float(0.5));
        assert_eq!(scc.lookup(Mask(0b10), ab).unwrap(), Prob::float(0.25));
        assert_eq!(scc.lookup(ab, ab).unwrap(), Prob::float(0.25));
        assert!(!scc.allows_empty());
        assert!(!scc.has_menu(Mask(0b01)));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            estimate_from_counts("menu;set;count\na;a,b;3\n"),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            estimate_from_counts("menu;set;count\na,b;a;0\n"),
            Err(Error::ZeroTotal(_))
        ));
        assert!(matches!(estimate_from_counts("menu;set;count\na;a;-1\n"), Err(Error::Csv(_))));
    }

    #[test]
    fn empty_set_marks_empty_variant_and_round_trips() {
        let text = "menu;set;count\na;;1\na;a;3\n";
        let (u, table) = parse_counts(text).unwrap();
        let scc = estimate_from_table(u.clone(), &table).unwrap();
        assert!(scc.allows_empty());
        assert_eq!(scc.lookup(Mask::EMPTY, Mask(1)).unwrap(), Prob::float(0.25));
        let again = write_counts(&u, &table).unwrap();
        assert_eq!(parse_counts(&again).unwrap().1, table);
    }
}
