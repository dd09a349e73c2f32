//! Linear temporal logic with past on bijective frames.
//!
//! Finite frames are permutations. The integers with `S(x) = x + 1` are
//! handled exactly through [`TailSet`]s, which covers every valuation that
//! is eventually constant in both directions.

mod doubling;
mod tail;

pub use doubling::{doubling, Doubled};
pub use tail::TailSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::spaces::PointSet;
use crate::syntax::{is_identifier, PltlFormula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PltlError {
    #[error("successor array is not a permutation: {0} appears twice or is out of range")]
    NotPermutation(usize),
    #[error("model declares size {declared} but the successor array has {found} entries")]
    SizeMismatch { declared: usize, found: usize },
    #[error("atom `{atom}` contains point {point} outside a carrier of {size}")]
    PointOutOfRange { atom: String, point: usize, size: usize },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("`{0}` is not a valid atom name")]
    InvalidName(String),
    #[error("agents must be distinct, got `{0}` twice")]
    SameAgent(String),
    #[error("atom `{0}` already occurs in the model")]
    WholeInUse(String),
    #[error("malformed model file: {0}")]
    Json(String),
}

/// A finite bijective frame `(X, S)` with a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectiveModel {
    succ: Vec<usize>,
    pred: Vec<usize>,
    atoms: Vec<String>,
    valuation: Vec<PointSet>,
}

impl BijectiveModel {
    pub fn new<I, S>(succ: Vec<usize>, valuation: I) -> Result<BijectiveModel, PltlError>
    where
        I: IntoIterator<Item = (S, Vec<usize>)>,
        S: Into<String>,
    {
        let n = succ.len();
        let mut pred = vec![usize::MAX; n];
        for (i, &s) in succ.iter().enumerate() {
            if s >= n || pred[s] != usize::MAX {
                return Err(PltlError::NotPermutation(s));
            }
            pred[s] = i;
        }
        let mut atoms = Vec::new();
        let mut sets = Vec::new();
        for (atom, members) in valuation {
            let atom = atom.into();
            if !is_identifier(&atom) || atoms.contains(&atom) {
                return Err(PltlError::InvalidName(atom));
            }
            if let Some(&point) = members.iter().find(|&&p| p >= n) {
                return Err(PltlError::PointOutOfRange { atom, point, size: n });
            }
            sets.push(PointSet::from_indices(n, members));
            atoms.push(atom);
        }
        Ok(BijectiveModel {
            succ,
            pred,
            atoms,
            valuation: sets,
        })
    }

    /// The `n`-cycle `i ↦ i + 1 mod n`.
    pub fn cycle<I, S>(n: usize, valuation: I) -> Result<BijectiveModel, PltlError>
    where
        I: IntoIterator<Item = (S, Vec<usize>)>,
        S: Into<String>,
    {
        BijectiveModel::new((0..n).map(|i| (i + 1) % n).collect(), valuation)
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self) -> &[usize] {
        &self.succ
    }

    pub fn pred(&self) -> &[usize] {
        &self.pred
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn valuation(&self, atom: &str) -> Result<&PointSet, PltlError> {
        self.atoms
            .iter()
            .position(|a| a == atom)
            .map(|i| &self.valuation[i])
            .ok_or_else(|| PltlError::UnknownAtom(atom.to_string()))
    }

    /// Cycles of the permutation, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for start in 0..self.size() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.succ[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.succ[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn from_json(text: &str) -> Result<BijectiveModel, PltlError> {
        let file: BijectiveFile = serde_json::from_str(text).map_err(|e| PltlError::Json(e.to_string()))?;
        if file.size != file.succ.len() {
            return Err(PltlError::SizeMismatch {
                declared: file.size,
                found: file.succ.len(),
            });
        }
        BijectiveModel::new(file.succ, file.valuation)
    }

    pub fn to_json(&self) -> String {
        let file = BijectiveFile {
            size: self.size(),
            succ: self.succ.clone(),
            valuation: self
                .atoms
                .iter()
                .zip(&self.valuation)
                .map(|(a, s)| (a.clone(), s.iter().collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model files always serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BijectiveFile {
    size: usize,
    succ: Vec<usize>,
    valuation: IndexMap<String, Vec<usize>>,
}

/// `(ℤ, x ↦ x + 1)` with eventually constant valuations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailModel {
    pub valuation: IndexMap<String, TailSet>,
}

impl TailModel {
    pub fn new<I, S>(valuation: I) -> TailModel
    where
        I: IntoIterator<Item = (S, TailSet)>,
        S: Into<String>,
    {
        TailModel {
            valuation: valuation.into_iter().map(|(a, s)| (a.into(), s)).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<TailModel, PltlError> {
        let m: TailModel = serde_json::from_str(text).map_err(|e| PltlError::Json(e.to_string()))?;
        if let Some(bad) = m.valuation.keys().find(|a| !is_identifier(a)) {
            return Err(PltlError::InvalidName(bad.clone()));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }
}

/// Truth set of `f` on a finite bijective model. `F` and `P` are computed
/// as closures under predecessor and successor respectively.
pub fn eval_pltl_finite(m: &BijectiveModel, f: &PltlFormula) -> Result<PointSet, PltlError> {
    let n = m.size();
    // {i : step(i) ∈ a}
    let pre = |a: &PointSet, step: &[usize]| PointSet::from_indices(n, (0..n).filter(|&i| a.contains(step[i])));
    let closure = |a: PointSet, step: &[usize]| {
        let mut z = a;
        loop {
            let next = &z | &pre(&z, step);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    Ok(match f {
        PltlFormula::True => PointSet::full(n),
        PltlFormula::False => PointSet::empty(n),
        PltlFormula::Prop(p) => m.valuation(p)?.clone(),
        PltlFormula::Not(g) => eval_pltl_finite(m, g)?.complement(),
        PltlFormula::And(l, r) => &eval_pltl_finite(m, l)? & &eval_pltl_finite(m, r)?,
        PltlFormula::Or(l, r) => &eval_pltl_finite(m, l)? | &eval_pltl_finite(m, r)?,
        PltlFormula::Implies(l, r) => &eval_pltl_finite(m, l)?.complement() | &eval_pltl_finite(m, r)?,
        PltlFormula::Next(g) => pre(&eval_pltl_finite(m, g)?, m.succ()),
        PltlFormula::Yesterday(g) => pre(&eval_pltl_finite(m, g)?, m.pred()),
        PltlFormula::Future(g) => closure(eval_pltl_finite(m, g)?, m.succ()),
        PltlFormula::Past(g) => closure(eval_pltl_finite(m, g)?, m.pred()),
    })
}

/// `(m, i) ⊨ f` by direct unfolding of the satisfaction clauses. `F` and
/// `P` look at `S^k(i)` and `S^-k(i)` for `k < n`, which is the whole orbit.
pub fn holds_at_finite(m: &BijectiveModel, i: usize, f: &PltlFormula) -> Result<bool, PltlError> {
    let n = m.size();
    let orbit = |step: &[usize], g: &PltlFormula| -> Result<bool, PltlError> {
        let mut x = i;
        for _ in 0..n {
            if holds_at_finite(m, x, g)? {
                return Ok(true);
            }
            x = step[x];
        }
        Ok(false)
    };
    Ok(match f {
        PltlFormula::True => true,
        PltlFormula::False => false,
        PltlFormula::Prop(p) => m.valuation(p)?.contains(i),
        PltlFormula::Not(g) => !holds_at_finite(m, i, g)?,
        PltlFormula::And(l, r) => holds_at_finite(m, i, l)? && holds_at_finite(m, i, r)?,
        PltlFormula::Or(l, r) => holds_at_finite(m, i, l)? || holds_at_finite(m, i, r)?,
        PltlFormula::Implies(l, r) => !holds_at_finite(m, i, l)? || holds_at_finite(m, i, r)?,
        PltlFormula::Next(g) => holds_at_finite(m, m.succ()[i], g)?,
        PltlFormula::Yesterday(g) => holds_at_finite(m, m.pred()[i], g)?,
        PltlFormula::Future(g) => orbit(m.succ(), g)?,
        PltlFormula::Past(g) => orbit(m.pred(), g)?,
    })
}

/// Exact truth set of `f` on the integers.
pub fn eval_pltl_tail(m: &TailModel, f: &PltlFormula) -> Result<TailSet, PltlError> {
    Ok(match f {
        PltlFormula::True => TailSet::full(),
        PltlFormula::False => TailSet::empty(),
        PltlFormula::Prop(p) => m
            .valuation
            .get(p)
            .cloned()
            .ok_or_else(|| PltlError::UnknownAtom(p.clone()))?,
        PltlFormula::Not(g) => eval_pltl_tail(m, g)?.complement(),
        PltlFormula::And(l, r) => eval_pltl_tail(m, l)?.intersection(&eval_pltl_tail(m, r)?),
        PltlFormula::Or(l, r) => eval_pltl_tail(m, l)?.union(&eval_pltl_tail(m, r)?),
        PltlFormula::Implies(l, r) => eval_pltl_tail(m, l)?.complement().union(&eval_pltl_tail(m, r)?),
        PltlFormula::Next(g) => eval_pltl_tail(m, g)?.shift(-1),
        PltlFormula::Yesterday(g) => eval_pltl_tail(m, g)?.shift(1),
        PltlFormula::Future(g) => eval_pltl_tail(m, g)?.eventually(),
        PltlFormula::Past(g) => eval_pltl_tail(m, g)?.once(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_pltl;

    fn pltl(s: &str) -> PltlFormula {
        parse_pltl(s).unwrap()
    }

    #[test]
    fn witness_fails_on_a_fixpoint() {
        let m = BijectiveModel::new(vec![0], [("q", vec![0])]).unwrap();
        assert!(eval_pltl_finite(&m, &pltl("F q & ~P q")).unwrap().is_empty());
    }

    #[test]
    fn next_on_a_three_cycle() {
        let m = BijectiveModel::cycle(3, [("q", vec![1])]).unwrap();
        assert_eq!(eval_pltl_finite(&m, &pltl("X q")).unwrap(), PointSet::singleton(3, 0));
        assert_eq!(eval_pltl_finite(&m, &pltl("Y q")).unwrap(), PointSet::singleton(3, 2));
        assert_eq!(eval_pltl_finite(&m, &pltl("F q")).unwrap(), PointSet::full(3));
    }

    #[test]
    fn future_and_past_fill_cycles() {
        // cycles {0, 1} and {2}
        let m = BijectiveModel::new(vec![1, 0, 2], [("q", vec![1])]).unwrap();
        let f = eval_pltl_finite(&m, &pltl("F q")).unwrap();
        assert_eq!(f, PointSet::from_indices(3, [0, 1]));
        assert_eq!(eval_pltl_finite(&m, &pltl("P q")).unwrap(), f);
        assert_eq!(m.cycles(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn integer_witness() {
        let m = TailModel::new([("q", TailSet::finite([1]))]);
        let s = eval_pltl_tail(&m, &pltl("F q & ~P q")).unwrap();
        assert_eq!(s, TailSet::up_to(0));
        assert!(s.contains(0));
        assert_eq!(eval_pltl_tail(&m, &pltl("true")).unwrap(), TailSet::full());
        assert_eq!(eval_pltl_tail(&m, &pltl("X Y q")).unwrap(), TailSet::finite([1]));
        assert_eq!(eval_pltl_tail(&m, &pltl("r")), Err(PltlError::UnknownAtom("r".into())));
    }

    #[test]
    fn rejects_non_permutations() {
        assert_eq!(
            BijectiveModel::new(vec![1, 1], Vec::<(String, Vec<usize>)>::new()),
            Err(PltlError::NotPermutation(1))
        );
        assert!(matches!(
            BijectiveModel::new(vec![0], [("q", vec![3])]),
            Err(PltlError::PointOutOfRange { point: 3, .. })
        ));
    }

    #[test]
    fn json_round_trips() {
        let text = r#"{ "size": 2, "succ": [1, 0], "valuation": { "q": [1] } }"#;
        let m = BijectiveModel::from_json(text).unwrap();
        assert_eq!(BijectiveModel::from_json(&m.to_json()).unwrap(), m);
        assert!(matches!(
            BijectiveModel::from_json(r#"{ "size": 3, "succ": [1, 0], "valuation": {} }"#),
            Err(PltlError::SizeMismatch { .. })
        ));
        let tail = r#"{ "valuation": { "q": { "left": false, "lo": 1, "bits": [true], "right": false } } }"#;
        let t = TailModel::from_json(tail).unwrap();
        assert_eq!(t.valuation["q"], TailSet::finite([1]));
        assert_eq!(TailModel::from_json(&t.to_json()).unwrap(), t);
    }
}
