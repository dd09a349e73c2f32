use super::{BijectiveModel, PltlError};
use crate::spaces::{FrameKind, Model, PointSet, Relation};
use crate::syntax::{is_identifier, Agent};

/// A doubled bijective model with its embedding `e(i) = x_i`.
#[derive(Debug, Clone)]
pub struct Doubled {
    pub model: Model,
    pub embedding: Vec<usize>,
}

/// Turns a finite bijective model into a bitopological one. Each point `i`
/// gets a primed copy; `a` pairs `x_i` with `x_i'` and `b` pairs `x_i'`
/// with `x_S(i)`, both as irreflexive 2-clusters. `whole` holds exactly at
/// the unprimed points and other atoms keep their values there, never at
/// primed points.
///
/// Points `0..n` are `x0..`, points `n..2n` are `x0'..`.
pub fn doubling(m: &BijectiveModel, a: &Agent, b: &Agent, whole: &str) -> Result<Doubled, PltlError> {
    if a == b {
        return Err(PltlError::SameAgent(a.to_string()));
    }
    if !is_identifier(whole) {
        return Err(PltlError::InvalidName(whole.to_string()));
    }
    if m.atoms().iter().any(|p| p == whole) {
        return Err(PltlError::WholeInUse(whole.to_string()));
    }
    if let Some(clash) = m.atoms().iter().find(|p| *p == a.as_str() || *p == b.as_str()) {
        return Err(PltlError::InvalidName(clash.clone()));
    }
    let n = m.size();
    let mut ra = vec![PointSet::empty(2 * n); 2 * n];
    let mut rb = vec![PointSet::empty(2 * n); 2 * n];
    for i in 0..n {
        ra[i].insert(n + i);
        ra[n + i].insert(i);
        let next = m.succ()[i];
        rb[n + i].insert(next);
        rb[next].insert(n + i);
    }
    let rel = |rows| Relation::from_rows(FrameKind::MonadicDerivative, rows).expect("disjoint pairs");
    let names = (0..n).map(|i| format!("x{i}")).chain((0..n).map(|i| format!("x{i}'"))).collect();
    let lift = |s: &PointSet| PointSet::from_indices(2 * n, s.iter());
    let mut valuation = vec![(whole.to_string(), PointSet::from_indices(2 * n, 0..n))];
    for p in m.atoms() {
        valuation.push((p.clone(), lift(m.valuation(p)?)));
    }
    let model = Model::from_parts(names, vec![(a.clone(), rel(ra)), (b.clone(), rel(rb))], valuation)
        .map_err(|e| PltlError::InvalidName(e.to_string()))?;
    Ok(Doubled {
        model,
        embedding: (0..n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{extract_successor, holds_at, validates_two};
    use crate::syntax::parse_formula_inferring;

    fn ab() -> (Agent, Agent) {
        ("a".parse().unwrap(), "b".parse().unwrap())
    }

    #[test]
    fn fixpoint_doubles_to_one_pair() {
        let (a, b) = ab();
        let m = BijectiveModel::new(vec![0], [("q", vec![0])]).unwrap();
        let d = doubling(&m, &a, &b, "whole").unwrap();
        assert_eq!(d.model.size(), 2);
        let pair = vec![d.model.full_set()];
        assert_eq!(d.model.atomic_opens(&a).unwrap(), pair);
        assert_eq!(d.model.atomic_opens(&b).unwrap(), pair);
        assert!(validates_two(&d.model, &a, &b, "whole").unwrap());
    }

    #[test]
    fn swap_alternates_whole() {
        let (a, b) = ab();
        let m = BijectiveModel::new(vec![1, 0], Vec::<(String, Vec<usize>)>::new()).unwrap();
        let d = doubling(&m, &a, &b, "whole").unwrap();
        assert_eq!(d.model.points(), &["x0", "x1", "x0'", "x1'"]);
        assert_eq!(d.model.valuation("whole").unwrap(), &d.model.set_of(&["x0", "x1"]).unwrap());
        assert!(validates_two(&d.model, &a, &b, "whole").unwrap());
        let f = parse_formula_inferring("<a>~whole").unwrap();
        assert!(holds_at(&d.model, 0, &f).unwrap());
        let sa = extract_successor(&d.model, &a).unwrap().unwrap();
        let sb = extract_successor(&d.model, &b).unwrap().unwrap();
        for i in 0..2 {
            assert_eq!(sb[sa[d.embedding[i]]], d.embedding[m.succ()[i]]);
        }
    }

    #[test]
    fn preconditions() {
        let (a, _) = ab();
        let m = BijectiveModel::new(vec![0], [("whole", vec![0])]).unwrap();
        assert_eq!(doubling(&m, &a, &a, "w").unwrap_err(), PltlError::SameAgent("a".into()));
        let (a, b) = ab();
        assert_eq!(doubling(&m, &a, &b, "whole").unwrap_err(), PltlError::WholeInUse("whole".into()));
    }
}
