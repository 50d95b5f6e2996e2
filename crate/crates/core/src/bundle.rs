use std::fmt;

/// Largest item count a [`Bundle`] can index.
pub const MAX_ITEMS: usize = 64;

/// A set of items, stored as a bitmask over the canonical item order.
///
/// Bit `t` set means item `t` is in the bundle. The raw mask doubles as the
/// row index into general utility tables.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn from_mask(mask: u64) -> Self {
        Bundle(mask)
    }

    /// Every item `0..items`.
    pub fn full(items: usize) -> Self {
        debug_assert!(items <= MAX_ITEMS);
        if items == MAX_ITEMS {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << items) - 1)
        }
    }

    pub fn singleton(item: usize) -> Self {
        Bundle(1u64 << item)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(Bundle::EMPTY, |b, t| b.with(t))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, item: usize) -> bool {
        item < MAX_ITEMS && self.0 & (1u64 << item) != 0
    }

    #[must_use]
    pub fn with(self, item: usize) -> Self {
        Bundle(self.0 | (1u64 << item))
    }

    #[must_use]
    pub fn without(self, item: usize) -> Self {
        Bundle(self.0 & !(1u64 << item))
    }

    #[must_use]
    pub fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Items in ascending order.
    pub fn iter(self) -> BundleIter {
        BundleIter(self.0)
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for Bundle {
    type Item = usize;
    type IntoIter = BundleIter;

    fn into_iter(self) -> BundleIter {
        self.iter()
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Bundle::from_items(iter)
    }
}

pub struct BundleIter(u64);

impl Iterator for BundleIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(t)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for BundleIter {}
