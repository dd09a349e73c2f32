use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use smallvec::SmallVec;

const WORD: usize = 64;

/// A subset of a finite carrier `{0, .., len-1}`.
///
/// Bits at positions `>= len` are always zero, so derived equality is set
/// equality. Carriers up to 128 points are stored inline.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

impl PointSet {
    pub fn empty(len: usize) -> Self {
        PointSet {
            len,
            words: SmallVec::from_elem(0, len.div_ceil(WORD)),
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = PointSet {
            len,
            words: SmallVec::from_elem(!0, len.div_ceil(WORD)),
        };
        s.trim();
        s
    }

    pub fn singleton(len: usize, point: usize) -> Self {
        let mut s = Self::empty(len);
        s.insert(point);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, points: I) -> Self {
        let mut s = Self::empty(len);
        for p in points {
            s.insert(p);
        }
        s
    }

    /// The set whose members are the set bits of `bits`; requires `len <= 64`.
    pub fn from_mask(len: usize, bits: u64) -> Self {
        assert!(len <= WORD, "from_mask needs a carrier of at most 64 points");
        let mut s = Self::empty(len);
        if len > 0 {
            s.words[0] = bits;
            s.trim();
        }
        s
    }

    /// The bitmask of a set over at most 64 points.
    pub fn mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the carrier this set lives in.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.len && self.words[point / WORD] >> (point % WORD) & 1 == 1
    }

    pub fn insert(&mut self, point: usize) {
        assert!(point < self.len, "point {point} outside carrier of size {}", self.len);
        self.words[point / WORD] |= 1 << (point % WORD);
    }

    pub fn remove(&mut self, point: usize) {
        if point < self.len {
            self.words[point / WORD] &= !(1 << (point % WORD));
        }
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn complement(&self) -> PointSet {
        let mut s = PointSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD + bit)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// The image of the set under an injective relabelling into a carrier of
    /// size `len`.
    pub fn map<F: Fn(usize) -> usize>(&self, len: usize, f: F) -> PointSet {
        PointSet::from_indices(len, self.iter().map(f))
    }

    /// All subsets of a carrier of size `len`, in mask order; `len <= 20`.
    pub fn all_subsets(len: usize) -> impl Iterator<Item = PointSet> {
        assert!(len <= 20, "refusing to enumerate 2^{len} subsets");
        (0u64..1 << len).map(move |m| PointSet::from_mask(len, m))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitOr for &PointSet {
    type Output = PointSet;
    fn bitor(self, rhs: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.union_with(rhs);
        s
    }
}

impl BitAnd for &PointSet {
    type Output = PointSet;
    fn bitand(self, rhs: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.intersect_with(rhs);
        s
    }
}

impl Sub for &PointSet {
    type Output = PointSet;
    fn sub(self, rhs: &PointSet) -> PointSet {
        self & &rhs.complement()
    }
}

impl Not for &PointSet {
    type Output = PointSet;
    fn not(self) -> PointSet {
        self.complement()
    }
}
