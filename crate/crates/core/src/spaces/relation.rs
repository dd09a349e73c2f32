use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FrameKind, PointSet};

/// Carriers up to this size get the exhaustive axiom check.
const EXHAUSTIVE_AXIOM_LIMIT: usize = 12;
const SAMPLED_AXIOM_CHECKS: usize = 20_000;

/// A witness that a relation lacks the property its kind requires.
/// Points are carrier indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameViolation {
    MissingLoop(usize),
    Loop(usize),
    NotSymmetric(usize, usize),
    NotTransitive(usize, usize, usize),
    NotWeaklyTransitive(usize, usize, usize),
    EdgeOutOfRange(usize, usize),
}

impl FrameViolation {
    /// Renders the violation with point names.
    pub fn describe(&self, name: impl Fn(usize) -> String) -> String {
        match *self {
            FrameViolation::MissingLoop(x) => format!("missing loop ({0}, {0})", name(x)),
            FrameViolation::Loop(x) => format!("unexpected loop ({0}, {0})", name(x)),
            FrameViolation::NotSymmetric(x, y) => {
                format!("edge ({}, {}) has no reverse", name(x), name(y))
            }
            FrameViolation::NotTransitive(w, s, t) => format!(
                "not transitive: ({}, {}, {}) lacks the edge to the last point",
                name(w),
                name(s),
                name(t)
            ),
            FrameViolation::NotWeaklyTransitive(w, s, t) => format!(
                "not weakly transitive: ({}, {}, {}) lacks the edge to the last point",
                name(w),
                name(s),
                name(t)
            ),
            FrameViolation::EdgeOutOfRange(x, y) => format!("edge ({x}, {y}) outside carrier"),
        }
    }
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(|i| i.to_string()))
    }
}

/// A failure of one of the derivative-space axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `d(∅)` is the given nonempty set.
    EmptyNotFixed(PointSet),
    /// `d(A ∪ B) ≠ d(A) ∪ d(B)`.
    NotAdditive { a: PointSet, b: PointSet },
    /// `d(d(A)) ⊄ A ∪ d(A)`.
    NotWeaklyIdempotent { a: PointSet },
}

fn check_reflexive(succ: &[PointSet]) -> Result<(), FrameViolation> {
    match (0..succ.len()).find(|&x| !succ[x].contains(x)) {
        Some(x) => Err(FrameViolation::MissingLoop(x)),
        None => Ok(()),
    }
}

fn check_irreflexive(succ: &[PointSet]) -> Result<(), FrameViolation> {
    match (0..succ.len()).find(|&x| succ[x].contains(x)) {
        Some(x) => Err(FrameViolation::Loop(x)),
        None => Ok(()),
    }
}

fn check_symmetric(succ: &[PointSet]) -> Result<(), FrameViolation> {
    for (x, row) in succ.iter().enumerate() {
        if let Some(y) = row.iter().find(|&y| !succ[y].contains(x)) {
            return Err(FrameViolation::NotSymmetric(x, y));
        }
    }
    Ok(())
}

/// Transitivity, or weak transitivity when `weak` (the target may be `w`).
fn check_transitive(succ: &[PointSet], weak: bool) -> Result<(), FrameViolation> {
    for (w, row) in succ.iter().enumerate() {
        for s in row.iter() {
            let mut missing = &succ[s] - row;
            if weak {
                missing.remove(w);
            }
            if let Some(t) = missing.first() {
                return Err(if weak {
                    FrameViolation::NotWeaklyTransitive(w, s, t)
                } else {
                    FrameViolation::NotTransitive(w, s, t)
                });
            }
        }
    }
    Ok(())
}

fn validate_rows(succ: &[PointSet], kind: FrameKind) -> Result<(), FrameViolation> {
    match kind {
        FrameKind::WK4 => check_transitive(succ, true),
        FrameKind::K4 => check_transitive(succ, false),
        FrameKind::S4 => {
            check_reflexive(succ)?;
            check_transitive(succ, false)
        }
        FrameKind::Equivalence => {
            check_reflexive(succ)?;
            check_symmetric(succ)?;
            check_transitive(succ, false)
        }
        FrameKind::IrreflexiveWK4 => {
            check_irreflexive(succ)?;
            check_transitive(succ, true)
        }
        FrameKind::MonadicDerivative => {
            check_irreflexive(succ)?;
            check_symmetric(succ)?;
            check_transitive(succ, true)
        }
    }
}

fn rows_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Vec<PointSet>, FrameViolation> {
    let mut succ = vec![PointSet::empty(n); n];
    for &(x, y) in edges {
        if x >= n || y >= n {
            return Err(FrameViolation::EdgeOutOfRange(x, y));
        }
        succ[x].insert(y);
    }
    Ok(succ)
}

/// Checks that `edges` over the carrier `{0..n-1}` have the property of `kind`.
pub fn validate_frame(n: usize, edges: &[(usize, usize)], kind: FrameKind) -> Result<(), FrameViolation> {
    validate_rows(&rows_from_edges(n, edges)?, kind)
}

/// A validated relation over a finite carrier, stored as successor rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    kind: FrameKind,
    succ: Vec<PointSet>,
}

impl Relation {
    pub fn new(n: usize, kind: FrameKind, edges: &[(usize, usize)]) -> Result<Self, FrameViolation> {
        Self::from_rows(kind, rows_from_edges(n, edges)?)
    }

    pub fn from_rows(kind: FrameKind, succ: Vec<PointSet>) -> Result<Self, FrameViolation> {
        let n = succ.len();
        if let Some((x, row)) = succ.iter().enumerate().find(|(_, r)| r.universe() != n) {
            return Err(FrameViolation::EdgeOutOfRange(x, row.universe()));
        }
        validate_rows(&succ, kind)?;
        Ok(Relation { kind, succ })
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, w: usize) -> &PointSet {
        &self.succ[w]
    }

    pub fn rows(&self) -> &[PointSet] {
        &self.succ
    }

    pub fn has_edge(&self, w: usize, v: usize) -> bool {
        self.succ[w].contains(v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(w, row)| row.iter().map(move |v| (w, v)))
    }

    /// Checks the relation against `kind`, whatever it was declared as.
    pub fn satisfies(&self, kind: FrameKind) -> Result<(), FrameViolation> {
        validate_rows(&self.succ, kind)
    }

    /// `d(A) = {w : ∃s. w ⊏ s ∈ A}`.
    pub fn derivative(&self, a: &PointSet) -> PointSet {
        relational_derivative(&self.succ, a)
    }

    /// `c(A) = A ∪ d(A)`.
    pub fn closure(&self, a: &PointSet) -> PointSet {
        a | &self.derivative(a)
    }

    pub fn interior(&self, a: &PointSet) -> PointSet {
        self.closure(&a.complement()).complement()
    }

    pub fn is_open(&self, a: &PointSet) -> bool {
        self.interior(a) == *a
    }

    /// The least open set containing `x`: `x` and everything reachable from it.
    pub fn least_neighbourhood(&self, x: usize) -> PointSet {
        let mut seen = PointSet::singleton(self.size(), x);
        let mut stack = vec![x];
        while let Some(w) = stack.pop() {
            for v in self.succ[w].iter() {
                if !seen.contains(v) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Minimal nonempty open sets, ordered by least member.
    pub fn atomic_opens(&self) -> Vec<PointSet> {
        let hoods: Vec<PointSet> = (0..self.size()).map(|x| self.least_neighbourhood(x)).collect();
        let mut out: Vec<PointSet> = Vec::new();
        for (x, u) in hoods.iter().enumerate() {
            let atomic = u.iter().all(|y| hoods[y] == *u);
            if atomic && u.first() == Some(x) {
                out.push(u.clone());
            }
        }
        out
    }

    /// Checks normality and weak idempotence of `d`: exhaustively over all
    /// subsets for carriers of at most 12 points, on a fixed random sample
    /// of subsets otherwise.
    pub fn check_derivative_axioms(&self) -> Result<(), AxiomViolation> {
        derivative_axioms(&self.succ)
    }
}

fn relational_derivative(succ: &[PointSet], a: &PointSet) -> PointSet {
    let mut out = PointSet::empty(succ.len());
    for (w, row) in succ.iter().enumerate() {
        if row.intersects(a) {
            out.insert(w);
        }
    }
    out
}

/// The derivative-axiom check for an arbitrary edge list, with no frame
/// property assumed. Panics if an edge leaves the carrier.
pub fn check_derivative_axioms(n: usize, edges: &[(usize, usize)]) -> Result<(), AxiomViolation> {
    let succ = rows_from_edges(n, edges).expect("edges must lie in the carrier");
    derivative_axioms(&succ)
}

fn derivative_axioms(succ: &[PointSet]) -> Result<(), AxiomViolation> {
    let n = succ.len();
    let d = |a: &PointSet| relational_derivative(succ, a);
    let d_empty = d(&PointSet::empty(n));
    if !d_empty.is_empty() {
        return Err(AxiomViolation::EmptyNotFixed(d_empty));
    }
    if n <= EXHAUSTIVE_AXIOM_LIMIT {
        let table: Vec<u64> = (0u64..1 << n)
            .map(|m| d(&PointSet::from_mask(n, m)).mask().expect("small carrier"))
            .collect();
        for a in 0..table.len() {
            for b in a + 1..table.len() {
                if table[a | b] != table[a] | table[b] {
                    return Err(AxiomViolation::NotAdditive {
                        a: PointSet::from_mask(n, a as u64),
                        b: PointSet::from_mask(n, b as u64),
                    });
                }
            }
        }
        for (a, &da) in table.iter().enumerate() {
            if table[da as usize] & !(a as u64 | da) != 0 {
                return Err(AxiomViolation::NotWeaklyIdempotent {
                    a: PointSet::from_mask(n, a as u64),
                });
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let random_set =
            |rng: &mut ChaCha8Rng| PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        for _ in 0..SAMPLED_AXIOM_CHECKS {
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            let da = d(&a);
            if d(&(&a | &b)) != &da | &d(&b) {
                return Err(AxiomViolation::NotAdditive { a, b });
            }
            if !d(&da).is_subset(&(&a | &da)) {
                return Err(AxiomViolation::NotWeaklyIdempotent { a });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // x = 0, y = 1, z = 2
    fn set(n: usize, pts: &[usize]) -> PointSet {
        PointSet::from_indices(n, pts.iter().copied())
    }

    #[test]
    fn two_cluster_is_irreflexive_wk4() {
        assert_eq!(validate_frame(2, &[(0, 1), (1, 0)], FrameKind::IrreflexiveWK4), Ok(()));
        assert_eq!(validate_frame(2, &[(0, 1), (1, 0)], FrameKind::MonadicDerivative), Ok(()));
    }

    #[test]
    fn broken_chain_violates_wk4() {
        assert_eq!(
            validate_frame(3, &[(0, 1), (1, 2)], FrameKind::WK4),
            Err(FrameViolation::NotWeaklyTransitive(0, 1, 2))
        );
    }

    #[test]
    fn empty_relation_is_not_s4() {
        assert_eq!(validate_frame(1, &[], FrameKind::S4), Err(FrameViolation::MissingLoop(0)));
    }

    #[test]
    fn weak_transitivity_allows_returning_to_start() {
        // x ⊏ y ⊏ x without loops is weakly but not strictly transitive
        assert_eq!(validate_frame(2, &[(0, 1), (1, 0)], FrameKind::WK4), Ok(()));
        assert_eq!(
            validate_frame(2, &[(0, 1), (1, 0)], FrameKind::K4),
            Err(FrameViolation::NotTransitive(0, 1, 0))
        );
        assert_eq!(
            validate_frame(2, &[(0, 1)], FrameKind::Equivalence),
            Err(FrameViolation::MissingLoop(0))
        );
        assert_eq!(
            validate_frame(2, &[(0, 0), (1, 1), (0, 1)], FrameKind::Equivalence),
            Err(FrameViolation::NotSymmetric(0, 1))
        );
        assert_eq!(validate_frame(1, &[(0, 0)], FrameKind::IrreflexiveWK4), Err(FrameViolation::Loop(0)));
        assert_eq!(
            validate_frame(1, &[(0, 3)], FrameKind::WK4),
            Err(FrameViolation::EdgeOutOfRange(0, 3))
        );
    }

    #[test]
    fn derivative_is_relational_preimage() {
        let r = Relation::new(2, FrameKind::WK4, &[(0, 1)]).unwrap();
        assert_eq!(r.derivative(&set(2, &[1])), set(2, &[0]));
        assert_eq!(r.derivative(&set(2, &[])), set(2, &[]));
        let cluster = Relation::new(2, FrameKind::MonadicDerivative, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(cluster.derivative(&set(2, &[0, 1])), set(2, &[0, 1]));
    }

    #[test]
    fn topology_of_small_frames() {
        let cluster = Relation::new(2, FrameKind::MonadicDerivative, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(cluster.atomic_opens(), vec![set(2, &[0, 1])]);
        assert!(cluster.is_open(&PointSet::full(2)));

        let chain = Relation::new(2, FrameKind::S4, &[(0, 0), (1, 1), (0, 1)]).unwrap();
        assert!(chain.is_open(&set(2, &[1])));
        assert!(!chain.is_open(&set(2, &[0])));
        assert_eq!(chain.interior(&set(2, &[0])), set(2, &[]));
        assert_eq!(chain.closure(&set(2, &[1])), set(2, &[0, 1]));
        assert_eq!(chain.atomic_opens(), vec![set(2, &[1])]);
    }

    #[test]
    fn axiom_check_examples() {
        let edges: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let wk4 = Relation::new(3, FrameKind::WK4, &edges).unwrap();
        assert_eq!(wk4.check_derivative_axioms(), Ok(()));

        assert_eq!(
            check_derivative_axioms(3, &[(0, 1), (1, 2)]),
            Err(AxiomViolation::NotWeaklyIdempotent { a: set(3, &[2]) })
        );

        let empty = Relation::new(4, FrameKind::WK4, &[]).unwrap();
        assert_eq!(empty.check_derivative_axioms(), Ok(()));
    }

    #[test]
    fn sampled_axiom_check_on_large_carrier() {
        let n = 14;
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let r = Relation::new(n, FrameKind::K4, &edges).unwrap();
        assert_eq!(r.check_derivative_axioms(), Ok(()));
    }
}
