use std::fmt;

use super::{truth_set, validates, EvalError};
use crate::spaces::{Model, PointSet};
use crate::syntax::{Agent, Formula, Program};

fn two_iota(i: &Agent, whole: &str) -> Formula {
    let w = Formula::prop(whole);
    let nw = Formula::not(w.clone());
    let step = || Program::Atom(i.clone());
    Formula::and(
        Formula::implies(
            w.clone(),
            Formula::and(Formula::boxed(step(), nw.clone()), Formula::diamond(step(), nw.clone())),
        ),
        Formula::implies(
            nw,
            Formula::and(Formula::boxed(step(), w.clone()), Formula::diamond(step(), w)),
        ),
    )
}

/// `Two_a ∧ Two_b`, where `Two_ι` says that every point sees only points of
/// the opposite `whole` parity, and at least one of them.
pub fn two_formula(a: &Agent, b: &Agent, whole: &str) -> Result<Formula, EvalError> {
    if a == b {
        return Err(EvalError::SameAgent(a.to_string()));
    }
    Ok(Formula::and(two_iota(a, whole), two_iota(b, whole)))
}

pub fn validates_two(m: &Model, a: &Agent, b: &Agent, whole: &str) -> Result<bool, EvalError> {
    validates(m, &two_formula(a, b, whole)?)
}

/// The first point at which no partner exists: it lies in no two-element
/// atomic open. `atomic_open` is the atomic open containing it, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessorFailure {
    pub point: usize,
    pub atomic_open: Option<PointSet>,
}

impl fmt::Display for SuccessorFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.atomic_open {
            Some(u) => write!(
                f,
                "point {} lies in an atomic open of {} points, not 2",
                self.point,
                u.count()
            ),
            None => write!(f, "point {} lies in no atomic open", self.point),
        }
    }
}

/// For each `x`, the unique `y ≠ x` with `{x, y}` an atomic `ι`-open.
/// Distinct atomic opens are disjoint, so such a `y` is unique whenever it
/// exists; the first point without one is reported instead of a map.
pub fn extract_successor(m: &Model, iota: &Agent) -> Result<Result<Vec<usize>, SuccessorFailure>, EvalError> {
    let rel = m.relation(iota)?;
    let mut owner: Vec<Option<PointSet>> = vec![None; m.size()];
    for u in rel.atomic_opens() {
        for x in u.iter() {
            owner[x] = Some(u.clone());
        }
    }
    let mut map = Vec::with_capacity(m.size());
    for (x, u) in owner.into_iter().enumerate() {
        match u {
            Some(u) if u.count() == 2 => {
                map.push(u.iter().find(|&y| y != x).expect("two points"));
            }
            atomic_open => return Ok(Err(SuccessorFailure { point: x, atomic_open })),
        }
    }
    Ok(Ok(map))
}

/// Common knowledge of `f` among `agents`, with its openness per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenReport {
    /// `⟦[(a1 u ... u an)*] f⟧`.
    pub truth_set: PointSet,
    pub open_for: Vec<(Agent, bool)>,
    /// For each point of the truth set, a jointly open set containing it
    /// and contained in `⟦f⟧`. The truth set itself serves for every point.
    pub witnesses: Vec<(usize, PointSet)>,
}

impl OpenReport {
    pub fn all_open(&self) -> bool {
        self.open_for.iter().all(|(_, open)| *open)
    }
}

pub fn common_knowledge_open_check(m: &Model, agents: &[Agent], f: &Formula) -> Result<OpenReport, EvalError> {
    let ck = Formula::common_knowledge(agents.iter().cloned(), f.clone()).ok_or(EvalError::NoAgents)?;
    let y = truth_set(m, &ck)?.truth_set;
    let open_for = agents
        .iter()
        .map(|a| Ok((a.clone(), m.relation(a)?.is_open(&y))))
        .collect::<Result<Vec<_>, EvalError>>()?;
    let witnesses = y.iter().map(|x| (x, y.clone())).collect();
    Ok(OpenReport {
        truth_set: y,
        open_for,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::FrameKind;
    use crate::syntax::parse_formula_inferring;

    fn agent(s: &str) -> Agent {
        s.parse().unwrap()
    }

    /// The doubled swap: x0 x1 unprimed, a-pairs {x_i, x_i'}, b-pairs {x_i', x_(1-i)}.
    fn doubled_swap() -> Model {
        let pair = |s: &'static str, t: &'static str| [(s, t), (t, s)];
        let a: Vec<_> = pair("x0", "x0'").into_iter().chain(pair("x1", "x1'")).collect();
        let b: Vec<_> = pair("x0'", "x1").into_iter().chain(pair("x1'", "x0")).collect();
        Model::builder(["x0", "x1", "x0'", "x1'"])
            .relation("a", FrameKind::MonadicDerivative, &a)
            .relation("b", FrameKind::MonadicDerivative, &b)
            .atom("whole", &["x0", "x1"])
            .build()
            .unwrap()
    }

    #[test]
    fn two_prints_as_displayed() {
        let f = two_formula(&agent("a"), &agent("b"), "whole").unwrap();
        let ta = "(whole -> [a]~whole & <a>~whole) & (~whole -> [a]whole & <a>whole)";
        let tb = ta.replace("[a]", "[b]").replace("<a>", "<b>");
        assert_eq!(f.to_string(), format!("{ta} & ({tb})"));
        assert_eq!(parse_formula_inferring(&f.to_string()).unwrap(), f);
        assert_eq!(two_formula(&agent("a"), &agent("a"), "whole"), Err(EvalError::SameAgent("a".into())));
    }

    #[test]
    fn doubled_swap_validates_two() {
        let m = doubled_swap();
        let (a, b) = (agent("a"), agent("b"));
        assert!(validates_two(&m, &a, &b, "whole").unwrap());
        let f = parse_formula_inferring("<a>~whole").unwrap();
        assert!(super::super::holds_at(&m, 0, &f).unwrap());
        let two = two_formula(&a, &b, "whole").unwrap();
        let report = common_knowledge_open_check(&m, &[a.clone(), b.clone()], &two).unwrap();
        assert!(report.truth_set.is_full());
        assert!(report.all_open());

        let sa = extract_successor(&m, &a).unwrap().unwrap();
        let sb = extract_successor(&m, &b).unwrap().unwrap();
        assert_eq!(sa, vec![2, 3, 0, 1]);
        // S_b ∘ S_a moves x0 to x1 and back
        assert_eq!(sb[sa[0]], 1);
        assert_eq!(sb[sa[1]], 0);
    }

    #[test]
    fn singleton_clusters_break_two() {
        let m = Model::builder(["x", "y"])
            .relation("a", FrameKind::MonadicDerivative, &[])
            .relation("b", FrameKind::MonadicDerivative, &[("x", "y"), ("y", "x")])
            .atom("whole", &["x", "y"])
            .build()
            .unwrap();
        assert!(!validates_two(&m, &agent("a"), &agent("b"), "whole").unwrap());
    }

    #[test]
    fn three_point_cluster_has_no_successor() {
        let edges = [("x", "y"), ("y", "x"), ("x", "z"), ("z", "x"), ("y", "z"), ("z", "y")];
        let m = Model::builder(["x", "y", "z"])
            .relation("a", FrameKind::MonadicDerivative, &edges)
            .build()
            .unwrap();
        let failure = extract_successor(&m, &agent("a")).unwrap().unwrap_err();
        assert_eq!(failure.point, 0);
        assert_eq!(failure.atomic_open, Some(m.full_set()));
    }

    #[test]
    fn common_knowledge_of_true_and_of_a_non_open_point() {
        let m = Model::builder(["x", "y"])
            .relation("a", FrameKind::MonadicDerivative, &[("x", "y"), ("y", "x")])
            .relation("b", FrameKind::MonadicDerivative, &[])
            .atom("p", &["x"])
            .build()
            .unwrap();
        let ab = [agent("a"), agent("b")];
        let all = common_knowledge_open_check(&m, &ab, &Formula::True).unwrap();
        assert!(all.truth_set.is_full() && all.all_open());
        let p = common_knowledge_open_check(&m, &ab, &Formula::prop("p")).unwrap();
        assert!(p.truth_set.is_empty() && p.all_open());
        assert!(p.witnesses.is_empty());
    }
}
