use std::fmt;

/// A subset of the grand set, one bit per item index.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mask(pub u32);

impl Mask {
    pub const EMPTY: Mask = Mask(0);

    /// The grand set of an `n`-item universe.
    pub fn full(n: usize) -> Mask {
        debug_assert!(n <= 16);
        Mask(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(item: usize) -> Mask {
        Mask(1 << item)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Mask {
        Mask(items.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 & (1 << item) != 0
    }

    pub fn is_subset_of(self, other: Mask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Mask) -> Mask {
        Mask(self.0 | other.0)
    }

    pub fn intersection(self, other: Mask) -> Mask {
        Mask(self.0 & other.0)
    }

    pub fn difference(self, other: Mask) -> Mask {
        Mask(self.0 & !other.0)
    }

    pub fn with(self, item: usize) -> Mask {
        Mask(self.0 | (1 << item))
    }

    pub fn without(self, item: usize) -> Mask {
        Mask(self.0 & !(1 << item))
    }

    /// Lowest item index in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Item indices in ascending order.
    pub fn items(self) -> Items {
        Items(self.0)
    }

    /// Every subset of `self` (including the empty set and `self`) in ascending
    /// numeric order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            set: self.0,
            next: Some(0),
        }
    }

    /// Non-empty subsets in ascending numeric order.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = Mask> {
        self.subsets().skip(1)
    }

    /// Position of `self` among the subsets of `menu` when the bits of `menu`
    /// are packed together (parallel bit extract).
    pub fn compress(self, menu: Mask) -> usize {
        let mut out = 0usize;
        let mut k = 0;
        let mut m = menu.0;
        while m != 0 {
            let low = m & m.wrapping_neg();
            if self.0 & low != 0 {
                out |= 1 << k;
            }
            k += 1;
            m ^= low;
        }
        out
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.items().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub struct Items(u32);

impl Iterator for Items {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Items {}

pub struct Subsets {
    set: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = Mask;

    fn next(&mut self) -> Option<Mask> {
        let cur = self.next?;
        self.next = if cur == self.set {
            None
        } else {
            Some((cur | !self.set).wrapping_add(1) & self.set)
        };
        Some(Mask(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_ascending_and_complete() {
        let s = Mask(0b1011);
        let subs: Vec<u32> = s.subsets().map(|m| m.0).collect();
        assert_eq!(subs, vec![0, 1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(Mask::EMPTY.subsets().count(), 1);
        assert_eq!(Mask::full(4).nonempty_subsets().count(), 15);
    }

    #[test]
    fn compress_packs_bits() {
        let menu = Mask(0b1010);
        assert_eq!(Mask(0b0000).compress(menu), 0);
        assert_eq!(Mask(0b0010).compress(menu), 1);
        assert_eq!(Mask(0b1000).compress(menu), 2);
        assert_eq!(Mask(0b1010).compress(menu), 3);
    }

    #[test]
    fn set_algebra() {
        let a = Mask::from_items([0, 2]);
        assert!(a.contains(2) && !a.contains(1));
        assert_eq!(a.with(1), Mask(0b111));
        assert_eq!(a.without(0), Mask(0b100));
        assert!(Mask(0b100).is_subset_of(a));
        assert!(!Mask(0b010).is_subset_of(a));
        assert_eq!(a.items().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(a.first(), Some(0));
        assert_eq!(Mask::full(16).len(), 16);
    }
}
