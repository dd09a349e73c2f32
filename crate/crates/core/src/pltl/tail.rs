use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of ℤ that is constant below `lo` (`left`) and at or above
/// `lo + bits.len()` (`right`), with `bits` giving membership in between.
///
/// Always canonical: no leading bit equals `left`, no trailing bit equals
/// `right`, and `lo = 0` when the window is empty and both tails agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, from = "RawTail")]
pub struct TailSet {
    left: bool,
    lo: i64,
    bits: Vec<bool>,
    right: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTail {
    left: bool,
    lo: i64,
    bits: Vec<bool>,
    right: bool,
}

impl From<RawTail> for TailSet {
    fn from(r: RawTail) -> Self {
        TailSet::new(r.left, r.lo, r.bits, r.right)
    }
}

impl TailSet {
    pub fn new(left: bool, lo: i64, mut bits: Vec<bool>, right: bool) -> TailSet {
        let lead = bits.iter().take_while(|&&b| b == left).count();
        bits.drain(..lead);
        let lo = lo + lead as i64;
        while bits.last() == Some(&right) {
            bits.pop();
        }
        let lo = if bits.is_empty() && left == right { 0 } else { lo };
        TailSet { left, lo, bits, right }
    }

    pub fn empty() -> TailSet {
        TailSet::new(false, 0, vec![], false)
    }

    pub fn full() -> TailSet {
        TailSet::new(true, 0, vec![], true)
    }

    pub fn finite<I: IntoIterator<Item = i64>>(points: I) -> TailSet {
        let points: Vec<i64> = points.into_iter().collect();
        let (Some(&lo), Some(&hi)) = (points.iter().min(), points.iter().max()) else {
            return TailSet::empty();
        };
        let mut bits = vec![false; (hi - lo + 1) as usize];
        for p in points {
            bits[(p - lo) as usize] = true;
        }
        TailSet::new(false, lo, bits, false)
    }

    /// `(-∞, k]`.
    pub fn up_to(k: i64) -> TailSet {
        TailSet::new(true, k + 1, vec![], false)
    }

    /// `[k, ∞)`.
    pub fn from(k: i64) -> TailSet {
        TailSet::new(false, k, vec![], true)
    }

    pub fn left(&self) -> bool {
        self.left
    }

    pub fn right(&self) -> bool {
        self.right
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// One past the last window position.
    pub fn hi_exclusive(&self) -> i64 {
        self.lo + self.bits.len() as i64
    }

    pub fn contains(&self, k: i64) -> bool {
        if k < self.lo {
            self.left
        } else if k >= self.hi_exclusive() {
            self.right
        } else {
            self.bits[(k - self.lo) as usize]
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == TailSet::empty()
    }

    pub fn is_full(&self) -> bool {
        *self == TailSet::full()
    }

    fn combine(&self, other: &TailSet, op: impl Fn(bool, bool) -> bool) -> TailSet {
        let lo = self.lo.min(other.lo);
        let hi = self.hi_exclusive().max(other.hi_exclusive());
        let bits = (lo..hi).map(|k| op(self.contains(k), other.contains(k))).collect();
        TailSet::new(op(self.left, other.left), lo, bits, op(self.right, other.right))
    }

    pub fn union(&self, other: &TailSet) -> TailSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &TailSet) -> TailSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn complement(&self) -> TailSet {
        TailSet::new(!self.left, self.lo, self.bits.iter().map(|b| !b).collect(), !self.right)
    }

    /// `{k + d : k ∈ A}`.
    pub fn shift(&self, d: i64) -> TailSet {
        TailSet::new(self.left, self.lo + d, self.bits.clone(), self.right)
    }

    /// The largest member, if the set is nonempty and bounded above.
    pub fn max(&self) -> Option<i64> {
        if self.right {
            return None;
        }
        match self.bits.iter().rposition(|&b| b) {
            Some(i) => Some(self.lo + i as i64),
            None if self.left => Some(self.lo - 1),
            None => None,
        }
    }

    /// The least member, if the set is nonempty and bounded below.
    pub fn min(&self) -> Option<i64> {
        if self.left {
            return None;
        }
        match self.bits.iter().position(|&b| b) {
            Some(i) => Some(self.lo + i as i64),
            None if self.right => Some(self.hi_exclusive()),
            None => None,
        }
    }

    /// `{k : ∃j ≥ 0. k + j ∈ A}`.
    pub fn eventually(&self) -> TailSet {
        if self.right {
            TailSet::full()
        } else {
            self.max().map_or_else(TailSet::empty, TailSet::up_to)
        }
    }

    /// `{k : ∃j ≥ 0. k - j ∈ A}`.
    pub fn once(&self) -> TailSet {
        if self.left {
            TailSet::full()
        } else {
            self.min().map_or_else(TailSet::empty, TailSet::from)
        }
    }

    /// Maximal runs of members; `None` bounds are infinite.
    pub fn intervals(&self) -> Vec<(Option<i64>, Option<i64>)> {
        let hi = self.hi_exclusive();
        let mut runs = Vec::new();
        let mut open: Option<Option<i64>> = self.left.then_some(None);
        for k in self.lo..hi {
            match (open, self.contains(k)) {
                (None, true) => open = Some(Some(k)),
                (Some(start), false) => {
                    runs.push((start, Some(k - 1)));
                    open = None;
                }
                _ => {}
            }
        }
        if self.right {
            runs.push((open.unwrap_or(Some(hi)), None));
        } else if let Some(start) = open {
            runs.push((start, Some(hi - 1)));
        }
        runs
    }
}

impl fmt::Display for TailSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let runs = self.intervals();
        if runs.is_empty() {
            return f.write_str("{}");
        }
        for (i, run) in runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            match *run {
                (None, None) => f.write_str("Z")?,
                (None, Some(e)) => write!(f, "(-inf, {e}]")?,
                (Some(s), None) => write!(f, "[{s}, +inf)")?,
                (Some(s), Some(e)) if s == e => write!(f, "{{{s}}}")?,
                (Some(s), Some(e)) => write!(f, "[{s}, {e}]")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_tail() -> impl Strategy<Value = TailSet> {
        (any::<bool>(), -6i64..6, proptest::collection::vec(any::<bool>(), 0..8), any::<bool>())
            .prop_map(|(l, lo, bits, r)| TailSet::new(l, lo, bits, r))
    }

    /// Points that decide equality of two sets with windows inside `[lo, hi)`.
    fn probe(a: &TailSet, b: &TailSet) -> Vec<i64> {
        let lo = a.lo().min(b.lo()) - 3;
        let hi = a.hi_exclusive().max(b.hi_exclusive()) + 3;
        (lo..hi).collect()
    }

    #[test]
    fn canonical_forms() {
        let s = TailSet::new(false, -2, vec![false, false, true, false], false);
        assert_eq!(s, TailSet::finite([0]));
        assert_eq!(s.lo(), 0);
        assert_eq!(TailSet::new(true, 7, vec![true], true), TailSet::full());
        assert_eq!(TailSet::full().bits(), &[] as &[bool]);
        assert_eq!(TailSet::up_to(0).to_string(), "(-inf, 0]");
        assert_eq!(TailSet::finite([1, 2, 5]).to_string(), "[1, 2] u {5}");
        assert_eq!(TailSet::full().to_string(), "Z");
        assert_eq!(TailSet::empty().to_string(), "{}");
    }

    #[test]
    fn temporal_closures() {
        let q = TailSet::finite([1]);
        assert_eq!(q.eventually(), TailSet::up_to(1));
        assert_eq!(q.once(), TailSet::from(1));
        assert_eq!(q.shift(-1).shift(1), q);
        assert_eq!(TailSet::empty().eventually(), TailSet::empty());
        assert_eq!(TailSet::from(4).eventually(), TailSet::full());
        assert_eq!(TailSet::up_to(4).eventually(), TailSet::up_to(4));
    }

    #[test]
    fn json_canonicalizes() {
        let s: TailSet = serde_json::from_str(r#"{"left":false,"lo":-1,"bits":[false,false,true],"right":false}"#).unwrap();
        assert_eq!(s, TailSet::finite([1]));
        assert!(serde_json::from_str::<TailSet>(r#"{"left":false,"lo":0,"bits":[],"right":false,"x":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn boolean_operations_are_pointwise(a in arb_tail(), b in arb_tail()) {
            let (u, i, c) = (a.union(&b), a.intersection(&b), a.complement());
            for k in probe(&a, &b) {
                prop_assert_eq!(u.contains(k), a.contains(k) || b.contains(k));
                prop_assert_eq!(i.contains(k), a.contains(k) && b.contains(k));
                prop_assert_eq!(c.contains(k), !a.contains(k));
            }
            prop_assert_eq!(&u, &TailSet::new(u.left(), u.lo(), u.bits().to_vec(), u.right()));
        }

        #[test]
        fn shifts_and_closures_are_pointwise(a in arb_tail(), d in -4i64..4) {
            let s = a.shift(d);
            let (ev, on) = (a.eventually(), a.once());
            for k in probe(&a, &s) {
                prop_assert_eq!(s.contains(k), a.contains(k - d));
                // within the probe range, a witness for F/P exists iff one exists at most
                // the window width away, or a tail supplies it
                let fwd = a.right() || (k..a.hi_exclusive() + 1).any(|j| a.contains(j));
                let bwd = a.left() || (a.lo() - 1..=k).any(|j| a.contains(j));
                prop_assert_eq!(ev.contains(k), fwd);
                prop_assert_eq!(on.contains(k), bwd);
            }
        }
    }
}
