use std::fmt;

/// Index of a letter in a matrix alphabet.
pub type Letter = u8;

/// Largest alphabet a [`LetterSet`] can hold.
pub const MAX_LETTERS: usize = 64;

/// A subset of the alphabet, stored as a 64-bit mask.
///
/// The empty set is meaningful: it is what a product collapses to when it
/// becomes the zero element.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LetterSet(u64);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        LetterSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The first `n` letters.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_LETTERS);
        if n == MAX_LETTERS {
            LetterSet(u64::MAX)
        } else {
            LetterSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(a: Letter) -> Self {
        LetterSet(1u64 << a)
    }

    pub fn contains(self, a: Letter) -> bool {
        (a as usize) < MAX_LETTERS && self.0 & (1u64 << a) != 0
    }

    pub fn insert(&mut self, a: Letter) {
        self.0 |= 1u64 << a;
    }

    pub fn intersection(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 & other.0)
    }

    pub fn union(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: LetterSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: LetterSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Letters in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = Letter> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let a = bits.trailing_zeros() as Letter;
            bits &= bits - 1;
            Some(a)
        })
    }
}

impl FromIterator<Letter> for LetterSet {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        let mut set = LetterSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
