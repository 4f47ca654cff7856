use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

use super::{Mask, Mode, Prob, ToleranceConfig, Universe};

/// One menu's distribution: collection -> probability. Missing collections are zero.
pub type Row = BTreeMap<Mask, Prob>;

/// A stochastic choice correspondence: for each recorded menu, a distribution
/// over the collections it contains.
#[derive(Clone, Debug, PartialEq)]
pub struct Scc {
    universe: Universe,
    allows_empty: bool,
    mode: Mode,
    rows: BTreeMap<Mask, Row>,
}

/// Which defining property of a correspondence a row breaks.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// (i) every value lies in [0, 1]
    Range,
    /// (ii) each menu's values sum to one
    Sum,
    /// (iii) only subsets of the menu carry mass
    Subset,
    /// the empty collection is recorded although `allows_empty` is off
    EmptyCollection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub menu: Mask,
    pub collection: Option<Mask>,
    pub property: Property,
    pub detail: String,
}

impl Scc {
    /// Builds a dataset from raw rows. Shape problems inside rows are kept and
    /// reported by [`Scc::validate`]; masks outside the universe and empty menus
    /// are rejected here. If any value is a float the whole dataset is float.
    pub fn new(universe: Universe, allows_empty: bool, rows: BTreeMap<Mask, Row>) -> Result<Scc> {
        let mut mode = Mode::Exact;
        for (menu, row) in &rows {
            universe.check_mask(*menu)?;
            if menu.is_empty() {
                return Err(Error::Schema("the empty menu cannot be recorded".into()));
            }
            for (t, p) in row {
                universe.check_mask(*t)?;
                mode = mode.combine(p.mode());
            }
        }
        let rows = if mode == Mode::Float {
            rows.into_iter()
                .map(|(s, row)| {
                    let row = row.into_iter().map(|(t, p)| (t, p.to_mode(Mode::Float))).collect();
                    (s, row)
                })
                .collect()
        } else {
            rows
        };
        Ok(Scc {
            universe,
            allows_empty,
            mode,
            rows,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.len()
    }

    pub fn grand_set(&self) -> Mask {
        self.universe.full()
    }

    pub fn allows_empty(&self) -> bool {
        self.allows_empty
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn menus(&self) -> impl Iterator<Item = Mask> + '_ {
        self.rows.keys().copied()
    }

    pub fn has_menu(&self, menu: Mask) -> bool {
        self.rows.contains_key(&menu)
    }

    pub fn row(&self, menu: Mask) -> Option<&Row> {
        self.rows.get(&menu)
    }

    pub fn rows(&self) -> &BTreeMap<Mask, Row> {
        &self.rows
    }

    /// Probability of choosing `collection` from `menu`.
    pub fn lookup(&self, collection: Mask, menu: Mask) -> Result<Prob> {
        let row = self.rows.get(&menu).ok_or(Error::MenuAbsent(menu))?;
        if !collection.is_subset_of(menu) {
            return Err(Error::Shape { collection, menu });
        }
        Ok(row
            .get(&collection)
            .cloned()
            .unwrap_or_else(|| Prob::zero(self.mode)))
    }

    /// Lookup that treats absent menus and rows as zero.
    pub(crate) fn get(&self, collection: Mask, menu: Mask) -> Prob {
        self.rows
            .get(&menu)
            .and_then(|r| r.get(&collection))
            .cloned()
            .unwrap_or_else(|| Prob::zero(self.mode))
    }

    pub fn first_missing_menu(&self) -> Option<Mask> {
        self.universe.menus().find(|s| !self.rows.contains_key(s))
    }

    pub fn is_complete(&self) -> bool {
        self.first_missing_menu().is_none()
    }

    pub fn require_complete(&self) -> Result<()> {
        match self.first_missing_menu() {
            Some(s) => Err(Error::Incomplete(s)),
            None => Ok(()),
        }
    }

    /// Checks the three defining properties on every recorded menu.
    pub fn validate(&self, tol: &ToleranceConfig) -> Vec<Violation> {
        let mut out = Vec::new();
        let one = Prob::one(self.mode);
        let zero = Prob::zero(self.mode);
        for (&menu, row) in &self.rows {
            let mut total = Prob::zero(self.mode);
            for (&t, p) in row {
                total = total + p;
                if !t.is_subset_of(menu) {
                    if !p.is_exact_zero() {
                        out.push(Violation {
                            menu,
                            collection: Some(t),
                            property: Property::Subset,
                            detail: format!(
                                "{} is not a subset of the menu but has probability {p}",
                                self.universe.format_set(t)
                            ),
                        });
                    }
                    continue;
                }
                if t.is_empty() && !self.allows_empty && !p.is_exact_zero() {
                    out.push(Violation {
                        menu,
                        collection: Some(t),
                        property: Property::EmptyCollection,
                        detail: format!("empty collection has probability {p}"),
                    });
                }
                let below = p.is_negative() && !tol.eq(p, &zero);
                let above = p.cmp_value(&one).is_gt() && !tol.eq(p, &one);
                if below || above {
                    out.push(Violation {
                        menu,
                        collection: Some(t),
                        property: Property::Range,
                        detail: format!("value {p} outside [0, 1]"),
                    });
                }
            }
            if !tol.sum_is_one(&total) {
                out.push(Violation {
                    menu,
                    collection: None,
                    property: Property::Sum,
                    detail: format!(
                        "menu {} sums to {total}",
                        self.universe.format_set(menu)
                    ),
                });
            }
        }
        out
    }

    /// True iff every admissible collection of every menu has positive probability.
    pub fn is_full_support(&self, tol: &ToleranceConfig) -> Result<bool> {
        self.require_complete()?;
        let skip = usize::from(!self.allows_empty);
        Ok(self.rows.iter().all(|(menu, _)| {
            menu.subsets()
                .skip(skip)
                .all(|t| tol.is_positive(&self.get(t, *menu)))
        }))
    }

    /// Row-by-row comparison with implicit zeros. Exact datasets compare exactly.
    pub fn equivalent(&self, other: &Scc, tol: &ToleranceConfig) -> bool {
        if self.universe != other.universe || self.rows.len() != other.rows.len() {
            return false;
        }
        for (menu, row) in &self.rows {
            let Some(other_row) = other.rows.get(menu) else {
                return false;
            };
            let keys = row.keys().chain(other_row.keys());
            for t in keys {
                if !tol.eq(&self.get(*t, *menu), &other.get(*t, *menu)) {
                    return false;
                }
            }
        }
        true
    }

    /// The same dataset with every value converted to floating point.
    pub fn to_float(&self) -> Scc {
        let rows = self
            .rows
            .iter()
            .map(|(s, row)| {
                let row = row.iter().map(|(t, p)| (*t, p.to_mode(Mode::Float))).collect();
                (*s, row)
            })
            .collect();
        Scc {
            universe: self.universe.clone(),
            allows_empty: self.allows_empty,
            mode: Mode::Float,
            rows,
        }
    }
}

/// Dense per-menu storage used by the exhaustive checks: the value of `T ⊆ S`
/// sits at index `T.compress(S)` of menu `S`'s vector.
pub(crate) struct Table {
    mode: Mode,
    menus: Vec<Option<Vec<Prob>>>,
}

impl Table {
    pub(crate) fn new(scc: &Scc) -> Table {
        let n = scc.n();
        let mut menus: Vec<Option<Vec<Prob>>> = vec![None; 1 << n];
        for (&menu, row) in scc.rows() {
            let mut values = vec![Prob::zero(scc.mode()); 1 << menu.len()];
            for (&t, p) in row {
                if t.is_subset_of(menu) {
                    values[t.compress(menu)] = p.clone();
                }
            }
            menus[menu.bits() as usize] = Some(values);
        }
        Table {
            mode: scc.mode(),
            menus,
        }
    }

    pub(crate) fn mode(&self) -> Mode {
        self.mode
    }

    /// `μ(T, S)`; callers guarantee `T ⊆ S` and that `S` is recorded.
    #[inline]
    pub(crate) fn get(&self, t: Mask, s: Mask) -> &Prob {
        debug_assert!(t.is_subset_of(s));
        &self.menus[s.bits() as usize]
            .as_ref()
            .expect("menu present in a complete dataset")[t.compress(s)]
    }
}
