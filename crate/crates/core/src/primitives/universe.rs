use crate::error::{Error, Result};

use super::Mask;

/// Hard cap on the number of items.
pub const MAX_ITEMS: usize = 16;

/// Above this size the exhaustive axiom checks get slow.
pub const EXHAUSTIVE_WARN_ITEMS: usize = 8;

/// The grand set. Labels are kept in lexicographic order and item `i` is bit
/// `i` of every mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    items: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(labels: I) -> Result<Universe>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut items: Vec<String> = labels.into_iter().map(Into::into).collect();
        items.sort();
        if items.is_empty() {
            return Err(Error::Universe("at least one item is required".into()));
        }
        if items.len() > MAX_ITEMS {
            return Err(Error::Universe(format!(
                "{} items exceeds the cap of {MAX_ITEMS}",
                items.len()
            )));
        }
        if let Some(w) = items.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Universe(format!("duplicate label `{}`", w[0])));
        }
        if items.iter().any(|l| l.is_empty() || l.contains([',', ';'])) {
            return Err(Error::Universe(
                "labels must be non-empty and free of `,` and `;`".into(),
            ));
        }
        Ok(Universe { items })
    }

    /// Single-letter labels `a`, `b`, ... for `n` items.
    pub fn letters(n: usize) -> Result<Universe> {
        Universe::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.items
    }

    pub fn label(&self, item: usize) -> &str {
        &self.items[item]
    }

    pub fn full(&self) -> Mask {
        Mask::full(self.items.len())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.items
            .binary_search_by(|l| l.as_str().cmp(label))
            .map_err(|_| Error::UnknownLabel(label.to_string()))
    }

    /// Mask of a list of labels; repeated labels are rejected.
    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Mask> {
        let mut m = Mask::EMPTY;
        for l in labels {
            let i = self.index_of(l.as_ref())?;
            if m.contains(i) {
                return Err(Error::Schema(format!("label `{}` repeated", l.as_ref())));
            }
            m = m.with(i);
        }
        Ok(m)
    }

    /// Parses a comma-separated label list; the empty string is the empty set.
    pub fn parse_set(&self, text: &str) -> Result<Mask> {
        let labels: Vec<&str> = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        self.mask_of(&labels)
    }

    pub fn labels_of(&self, mask: Mask) -> Vec<String> {
        mask.items().map(|i| self.items[i].clone()).collect()
    }

    pub fn format_set(&self, mask: Mask) -> String {
        format!("{{{}}}", self.labels_of(mask).join(","))
    }

    pub fn check_mask(&self, mask: Mask) -> Result<()> {
        if mask.is_subset_of(self.full()) {
            Ok(())
        } else {
            Err(Error::MaskOutOfRange {
                mask: mask.bits(),
                n: self.len(),
            })
        }
    }

    /// All non-empty menus in ascending mask order.
    pub fn menus(&self) -> impl Iterator<Item = Mask> {
        self.full().nonempty_subsets()
    }
}
