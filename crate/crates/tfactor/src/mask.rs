//! Fixed-width vertex bitsets used by the degree and search kernels.

use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not};

pub const MASK_BITS: usize = 256;
const WORDS: usize = MASK_BITS / 64;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Mask([u64; WORDS]);

impl Mask {
    pub const EMPTY: Mask = Mask([0; WORDS]);

    /// Mask with bits `0..n` set.
    pub fn prefix(n: usize) -> Mask {
        debug_assert!(n <= MASK_BITS);
        let mut m = Mask::EMPTY;
        for w in 0..WORDS {
            let lo = w * 64;
            if n >= lo + 64 {
                m.0[w] = u64::MAX;
            } else if n > lo {
                m.0[w] = (1u64 << (n - lo)) - 1;
            }
        }
        m
    }

    /// Bits strictly above `i`.
    pub fn above(i: usize) -> Mask {
        !Mask::prefix(i + 1)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0[i >> 6] &= !(1u64 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        (self.0[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        for (w, &word) in self.0.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> MaskIter {
        MaskIter {
            words: self.0,
            w: 0,
        }
    }
}

impl std::fmt::Debug for Mask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct MaskIter {
    words: [u64; WORDS],
    w: usize,
}

impl Iterator for MaskIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.w < WORDS {
            let word = self.words[self.w];
            if word != 0 {
                let b = word.trailing_zeros() as usize;
                self.words[self.w] &= word - 1;
                return Some(self.w * 64 + b);
            }
            self.w += 1;
        }
        None
    }
}

macro_rules! bitop {
    ($tr:ident, $f:ident, $tra:ident, $fa:ident, $op:tt) => {
        impl $tr for Mask {
            type Output = Mask;
            #[inline]
            fn $f(self, rhs: Mask) -> Mask {
                let mut out = self;
                for w in 0..WORDS {
                    out.0[w] = self.0[w] $op rhs.0[w];
                }
                out
            }
        }
        impl $tra for Mask {
            #[inline]
            fn $fa(&mut self, rhs: Mask) {
                for w in 0..WORDS {
                    self.0[w] = self.0[w] $op rhs.0[w];
                }
            }
        }
    };
}

bitop!(BitAnd, bitand, BitAndAssign, bitand_assign, &);
bitop!(BitOr, bitor, BitOrAssign, bitor_assign, |);

impl Not for Mask {
    type Output = Mask;
    #[inline]
    fn not(self) -> Mask {
        let mut out = self;
        for w in 0..WORDS {
            out.0[w] = !self.0[w];
        }
        out
    }
}

impl FromIterator<usize> for Mask {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Mask {
        let mut m = Mask::EMPTY;
        for i in it {
            m.insert(i);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_above_partition_the_range() {
        for i in [0usize, 5, 63, 64, 130, 254] {
            let lo = Mask::prefix(i + 1);
            let hi = Mask::above(i);
            assert!((lo & hi).is_empty());
            assert_eq!((lo | hi).count(), MASK_BITS);
            assert!(lo.contains(i));
        }
    }

    #[test]
    fn iter_matches_inserts() {
        let m = Mask::from_iter([3, 64, 65, 200]);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![3, 64, 65, 200]);
        assert_eq!(m.count(), 4);
        assert_eq!(m.first(), Some(3));
    }
}
