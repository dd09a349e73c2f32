//! Model transformations: reflexive-transitive and transitive closure,
//! splitting reflexive points into irreflexive clusters, restriction to a
//! jointly open subset, and truncated tree unwinding.

use std::collections::VecDeque;

use super::model::default_names;
use super::{FrameKind, Model, ModelError, PointSet, Relation};
use crate::syntax::Agent;

/// Nodes allowed in a bounded unwinding before giving up.
const UNWINDING_NODE_LIMIT: usize = 200_000;

/// A map from `source` onto `target` claimed to be a surjective p-morphism
/// for `agents` that also preserves every atom of `target`.
#[derive(Debug, Clone)]
pub struct PMorphismWitness {
    pub source: Model,
    pub target: Model,
    pub map: Vec<usize>,
    pub agents: Vec<Agent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PMorphismViolation {
    #[error("map has {found} entries for a source of {expected} points")]
    WrongLength { expected: usize, found: usize },
    #[error("target point {0} has no preimage")]
    NotSurjective(usize),
    #[error("agent `{agent}`: source edge ({from}, {to}) is not preserved")]
    Forth { agent: Agent, from: usize, to: usize },
    #[error("agent `{agent}`: target edge from the image of {from} to {target_to} does not lift")]
    Back {
        agent: Agent,
        from: usize,
        target_to: usize,
    },
    #[error("atom `{atom}` differs at source point {point}")]
    Atom { atom: String, point: usize },
    #[error("agent `{0}` is missing from one of the models")]
    UnknownAgent(Agent),
}

impl PMorphismWitness {
    pub fn verify(&self) -> Result<(), PMorphismViolation> {
        self.verify_where(|_| true)
    }

    /// Checks surjectivity, atoms and forth everywhere, and the back
    /// condition only at source points accepted by `check_back`.
    pub fn verify_where<F: Fn(usize) -> bool>(&self, check_back: F) -> Result<(), PMorphismViolation> {
        let (src, tgt) = (&self.source, &self.target);
        if self.map.len() != src.size() {
            return Err(PMorphismViolation::WrongLength {
                expected: src.size(),
                found: self.map.len(),
            });
        }
        let image = PointSet::from_indices(tgt.size(), self.map.iter().copied());
        if let Some(missing) = image.complement().first() {
            return Err(PMorphismViolation::NotSurjective(missing));
        }
        for (i, atom) in tgt.atoms().iter().enumerate() {
            let tv = tgt.valuation_at(i);
            let sv = src
                .valuation(atom)
                .map_err(|_| PMorphismViolation::Atom {
                    atom: atom.clone(),
                    point: 0,
                })?;
            if let Some(point) = (0..src.size()).find(|&x| sv.contains(x) != tv.contains(self.map[x])) {
                return Err(PMorphismViolation::Atom {
                    atom: atom.clone(),
                    point,
                });
            }
        }
        for agent in &self.agents {
            let unknown = || PMorphismViolation::UnknownAgent(agent.clone());
            let rs = src.relation(agent).map_err(|_| unknown())?;
            let rt = tgt.relation(agent).map_err(|_| unknown())?;
            for (from, to) in rs.edges() {
                if !rt.has_edge(self.map[from], self.map[to]) {
                    return Err(PMorphismViolation::Forth {
                        agent: agent.clone(),
                        from,
                        to,
                    });
                }
            }
            for from in (0..src.size()).filter(|&x| check_back(x)) {
                let lifted = rs.successors(from).map(tgt.size(), |v| self.map[v]);
                if let Some(target_to) = (rt.successors(self.map[from]) - &lifted).first() {
                    return Err(PMorphismViolation::Back {
                        agent: agent.clone(),
                        from,
                        target_to,
                    });
                }
            }
        }
        Ok(())
    }
}

fn warshall(rows: &mut [PointSet]) {
    for k in 0..rows.len() {
        let via = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&via);
            }
        }
    }
}

fn map_relations(m: &Model, kind: FrameKind, reflexive: bool) -> Model {
    let n = m.size();
    let relations = m
        .relations()
        .map(|(a, r)| {
            let mut rows = r.rows().to_vec();
            warshall(&mut rows);
            if reflexive {
                for (x, row) in rows.iter_mut().enumerate() {
                    row.insert(x);
                }
            }
            let rel = Relation::from_rows(kind, rows).expect("closures have the target kind");
            (a.clone(), rel)
        })
        .collect();
    let valuation = m
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), m.valuation_at(i).clone()))
        .collect();
    debug_assert!(n == m.size());
    Model::from_parts(m.points().to_vec(), relations, valuation).expect("same names as the input")
}

/// Replaces every relation by its reflexive-transitive closure (kind S4).
pub fn reflexive_transitive_closure(m: &Model) -> Model {
    map_relations(m, FrameKind::S4, true)
}

/// Replaces every relation by its transitive closure (kind K4).
pub fn transitive_closure(m: &Model) -> Model {
    map_relations(m, FrameKind::K4, false)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error("relation of agent `{agent}` is not weakly transitive: {witness}")]
    NotWeaklyTransitive { agent: String, witness: String },
    /// A point reflexive for some agent is irreflexive for `agent` but sits
    /// in a nontrivial `agent`-cluster; its two copies cannot both stay in
    /// that cluster without a forbidden edge between them.
    #[error("point `{point}` must be split for another agent but lies in an irreflexive cluster of `{agent}`")]
    SplitConflict { agent: String, point: String },
}

fn fresh_name(taken: &std::collections::HashSet<String>, base: &str) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Splits every reflexive point `w` into a two-point cluster
/// `{(w,0), (w,1)}` with
/// `(w,i) ⊏' (v,j)` iff `w ≠ v` and `w ⊏ v`, or `w = v`, `w ⊏ w` and `i ≠ j`.
///
/// The result is irreflexive and weakly transitive for every agent, has at
/// most twice as many points, and projects onto `m` by a surjective
/// p-morphism, returned as the witness. Copy 0 keeps the original name and
/// copy 1 gets a prime.
///
/// With several agents a point is split as soon as it is reflexive for one
/// of them; this is rejected when such a point is irreflexive for another
/// agent yet has a cluster-mate there.
pub fn irreflexive_resolution(m: &Model) -> Result<(Model, PMorphismWitness), ResolutionError> {
    let n = m.size();
    for (a, r) in m.relations() {
        r.satisfies(FrameKind::WK4)
            .map_err(|v| ResolutionError::NotWeaklyTransitive {
                agent: a.to_string(),
                witness: v.describe(|i| m.point_name(i).to_string()),
            })?;
    }
    let split: Vec<bool> = (0..n)
        .map(|w| m.relations().any(|(_, r)| r.has_edge(w, w)))
        .collect();
    for (a, r) in m.relations() {
        for w in (0..n).filter(|&w| split[w] && !r.has_edge(w, w)) {
            if r.successors(w).iter().any(|v| v != w && r.has_edge(v, w)) {
                return Err(ResolutionError::SplitConflict {
                    agent: a.to_string(),
                    point: m.point_name(w).to_string(),
                });
            }
        }
    }

    // copies[w] = indices of the copies of w in the new carrier
    let mut copies: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut label = Vec::new();
    let mut names = Vec::new();
    let taken: std::collections::HashSet<String> = m.points().iter().cloned().collect();
    for w in 0..n {
        let mut c = vec![label.len()];
        label.push(w);
        names.push(m.point_name(w).to_string());
        if split[w] {
            c.push(label.len());
            label.push(w);
            names.push(fresh_name(&taken, m.point_name(w)));
        }
        copies.push(c);
    }
    let size = label.len();

    let mut relations = Vec::new();
    for (a, r) in m.relations() {
        let mut rows = vec![PointSet::empty(size); size];
        for w in 0..n {
            for &cw in &copies[w] {
                for v in r.successors(w).iter() {
                    for &cv in &copies[v] {
                        if cw != cv {
                            rows[cw].insert(cv);
                        }
                    }
                }
            }
        }
        let rel = Relation::from_rows(FrameKind::IrreflexiveWK4, rows).map_err(|_| {
            ResolutionError::SplitConflict {
                agent: a.to_string(),
                point: String::new(),
            }
        })?;
        relations.push((a.clone(), rel));
    }
    let valuation = m
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, atom)| {
            let v = m.valuation_at(i);
            (atom.clone(), PointSet::from_indices(size, (0..size).filter(|&x| v.contains(label[x]))))
        })
        .collect();
    let resolved = Model::from_parts(names, relations, valuation).expect("fresh names are unique");
    let witness = PMorphismWitness {
        source: resolved.clone(),
        target: m.clone(),
        map: label,
        agents: m.agents().to_vec(),
    };
    Ok((resolved, witness))
}

/// The submodel on `u`, which must be open for each of `agents`. Points keep
/// their names; the k-th point of the result is the k-th member of `u`.
pub fn restrict_to_open(m: &Model, u: &PointSet, agents: &[Agent]) -> Result<Model, ModelError> {
    for a in agents {
        if !m.relation(a)?.is_open(u) {
            return Err(ModelError::NotOpen(a.to_string()));
        }
    }
    let keep: Vec<usize> = u.iter().collect();
    let k = keep.len();
    let mut new_index = vec![usize::MAX; m.size()];
    for (i, &old) in keep.iter().enumerate() {
        new_index[old] = i;
    }
    let project = |s: &PointSet| PointSet::from_indices(k, s.iter().filter(|&x| u.contains(x)).map(|x| new_index[x]));
    let relations = m
        .relations()
        .map(|(a, r)| {
            let rows = keep.iter().map(|&w| project(r.successors(w))).collect();
            let rel = Relation::from_rows(r.kind(), rows).expect("every frame kind is hereditary");
            (a.clone(), rel)
        })
        .collect();
    let valuation = m
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, atom)| (atom.clone(), project(m.valuation_at(i))))
        .collect();
    let names = keep.iter().map(|&w| m.point_name(w).to_string()).collect();
    Model::from_parts(names, relations, valuation)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnwindError {
    #[error("relation of agent `{agent}` is not transitive: {witness}")]
    NotTransitive { agent: String, witness: String },
    #[error("maximum sequence length must be positive")]
    ZeroLength,
    #[error("root {0} is outside the carrier")]
    RootOutOfRange(usize),
    #[error("unwinding exceeds {0} nodes")]
    TooLarge(usize),
}

/// A truncated unwinding together with the last-element labelling.
#[derive(Debug, Clone)]
pub struct Unwinding {
    pub model: Model,
    /// `label[v]` is the last element of sequence `v`.
    pub label: Vec<usize>,
    /// `length[v]` is the length of sequence `v`; the root sequence is node 0.
    pub length: Vec<usize>,
    pub max_len: usize,
}

impl Unwinding {
    /// The labelling as a p-morphism witness onto `target`. Only nodes
    /// shorter than the bound satisfy the back condition.
    pub fn witness(&self, target: &Model) -> PMorphismWitness {
        PMorphismWitness {
            source: self.model.clone(),
            target: target.clone(),
            map: self.label.clone(),
            agents: target.agents().to_vec(),
        }
    }
}

struct Node {
    parent: Option<usize>,
    last: usize,
    len: usize,
    /// agents whose relation contains the step from the parent to this node
    step: u64,
}

/// Unwinds `m` from `root` into the tree of nonempty edge-following
/// sequences of length at most `max_len`. A sequence is `a`-below another
/// iff it is a proper initial segment of it and every appended step is an
/// `a`-edge. The result is transitive and irreflexive for every agent, and
/// its points are named by their sequences joined with `/`.
///
/// Truncation breaks the back condition at sequences of length `max_len`.
pub fn bounded_unwinding(m: &Model, root: usize, max_len: usize) -> Result<Unwinding, UnwindError> {
    if max_len == 0 {
        return Err(UnwindError::ZeroLength);
    }
    if root >= m.size() {
        return Err(UnwindError::RootOutOfRange(root));
    }
    for (a, r) in m.relations() {
        r.satisfies(FrameKind::K4).map_err(|v| UnwindError::NotTransitive {
            agent: a.to_string(),
            witness: v.describe(|i| m.point_name(i).to_string()),
        })?;
    }
    assert!(m.agents().len() <= 64, "unwinding supports at most 64 agents");
    let rels: Vec<&Relation> = m.relations().map(|(_, r)| r).collect();

    let mut nodes = vec![Node {
        parent: None,
        last: root,
        len: 1,
        step: 0,
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if nodes[v].len >= max_len {
            continue;
        }
        let s = nodes[v].last;
        for t in 0..m.size() {
            let step = rels
                .iter()
                .enumerate()
                .filter(|(_, r)| r.has_edge(s, t))
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            if step != 0 {
                if nodes.len() >= UNWINDING_NODE_LIMIT {
                    return Err(UnwindError::TooLarge(UNWINDING_NODE_LIMIT));
                }
                let len = nodes[v].len + 1;
                nodes.push(Node {
                    parent: Some(v),
                    last: t,
                    len,
                    step,
                });
                queue.push_back(nodes.len() - 1);
            }
        }
    }

    let size = nodes.len();
    let mut rows = vec![vec![PointSet::empty(size); size]; rels.len()];
    for v in 0..size {
        let mut mask = u64::MAX;
        let mut cur = v;
        while let Some(p) = nodes[cur].parent {
            mask &= nodes[cur].step;
            if mask == 0 {
                break;
            }
            for (i, agent_rows) in rows.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    agent_rows[p].insert(v);
                }
            }
            cur = p;
        }
    }
    let relations = m
        .agents()
        .iter()
        .zip(rows)
        .map(|(a, r)| {
            let rel = Relation::from_rows(FrameKind::K4, r).expect("initial segments are transitive");
            (a.clone(), rel)
        })
        .collect();

    let label: Vec<usize> = nodes.iter().map(|n| n.last).collect();
    let length: Vec<usize> = nodes.iter().map(|n| n.len).collect();
    let names: Vec<String> = (0..size)
        .map(|v| {
            let mut seq = vec![m.point_name(nodes[v].last)];
            let mut cur = v;
            while let Some(p) = nodes[cur].parent {
                seq.push(m.point_name(nodes[p].last));
                cur = p;
            }
            seq.reverse();
            seq.join("/")
        })
        .collect();
    let valuation = m
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, atom)| {
            let val = m.valuation_at(i);
            (atom.clone(), PointSet::from_indices(size, (0..size).filter(|&x| val.contains(label[x]))))
        })
        .collect();
    // point names containing `/` can make sequence names collide
    let distinct: std::collections::HashSet<&String> = names.iter().collect();
    let names = if distinct.len() == size { names } else { default_names(size) };
    let model = Model::from_parts(names, relations, valuation).expect("unwinding names are unique");
    Ok(Unwinding {
        model,
        label,
        length,
        max_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(s: &str) -> Agent {
        s.parse().unwrap()
    }

    fn chain() -> Model {
        Model::builder(["x", "y", "z"])
            .relation("a", FrameKind::WK4, &[("x", "y"), ("y", "z"), ("x", "z"), ("z", "z")])
            .atom("p", &["z"])
            .build()
            .unwrap()
    }

    #[test]
    fn closures_have_their_kinds() {
        let m = chain();
        let s4 = reflexive_transitive_closure(&m);
        let r = s4.relation(&agent("a")).unwrap();
        assert_eq!(r.kind(), FrameKind::S4);
        assert!((0..3).all(|x| r.has_edge(x, x)));
        let k4 = transitive_closure(&m);
        assert_eq!(k4.relation(&agent("a")).unwrap().edges().count(), 4);
    }

    #[test]
    fn resolution_splits_reflexive_points() {
        let m = chain();
        let (r, w) = irreflexive_resolution(&m).unwrap();
        assert_eq!(r.size(), 4);
        assert_eq!(r.points(), &["x", "y", "z", "z'"]);
        assert_eq!(w.map, vec![0, 1, 2, 2]);
        assert_eq!(r.relation(&agent("a")).unwrap().kind(), FrameKind::IrreflexiveWK4);
        assert_eq!(w.verify(), Ok(()));
        assert_eq!(r.valuation("p").unwrap(), &r.set_of(&["z", "z'"]).unwrap());
    }

    #[test]
    fn resolution_on_a_single_loop_gives_a_cluster() {
        let m = Model::builder(["x"])
            .relation("a", FrameKind::S4, &[("x", "x")])
            .build()
            .unwrap();
        let (r, w) = irreflexive_resolution(&m).unwrap();
        let rel = r.relation(&agent("a")).unwrap();
        assert_eq!(rel.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(w.verify(), Ok(()));
    }

    #[test]
    fn resolution_rejects_conflicting_agents() {
        let m = Model::builder(["x", "y"])
            .relation("a", FrameKind::S4, &[("x", "x"), ("y", "y")])
            .relation("b", FrameKind::MonadicDerivative, &[("x", "y"), ("y", "x")])
            .build()
            .unwrap();
        assert!(matches!(
            irreflexive_resolution(&m),
            Err(ResolutionError::SplitConflict { agent, .. }) if agent == "b"
        ));
    }

    #[test]
    fn broken_p_morphisms_are_reported() {
        let m = chain();
        let (_, mut w) = irreflexive_resolution(&m).unwrap();
        w.map = vec![0, 1, 2, 1];
        assert!(w.verify().is_err());
        w.map = vec![0, 0, 2, 2];
        assert_eq!(w.verify(), Err(PMorphismViolation::NotSurjective(1)));
    }

    #[test]
    fn restriction_requires_an_open_set() {
        let m = chain();
        let a = agent("a");
        let u = m.set_of(&["y", "z"]).unwrap();
        let sub = restrict_to_open(&m, &u, &[a.clone()]).unwrap();
        assert_eq!(sub.points(), &["y", "z"]);
        assert_eq!(sub.relation(&a).unwrap().edges().collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
        let not_open = m.set_of(&["x"]).unwrap();
        assert!(matches!(restrict_to_open(&m, &not_open, &[a]), Err(ModelError::NotOpen(_))));
    }

    #[test]
    fn unwinding_of_a_loop_is_a_chain() {
        let m = Model::builder(["x"])
            .relation("a", FrameKind::S4, &[("x", "x")])
            .atom("p", &["x"])
            .build()
            .unwrap();
        let u = bounded_unwinding(&m, 0, 3).unwrap();
        assert_eq!(u.model.points(), &["x", "x/x", "x/x/x"]);
        assert_eq!(u.length, vec![1, 2, 3]);
        let rel = u.model.relation(&agent("a")).unwrap();
        assert_eq!(rel.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let w = u.witness(&m);
        assert_eq!(w.verify_where(|v| u.length[v] < 3), Ok(()));
        assert!(w.verify().is_err());
    }

    #[test]
    fn unwinding_separates_agents() {
        let m = Model::builder(["x", "y", "z"])
            .relation("a", FrameKind::K4, &[("x", "y")])
            .relation("b", FrameKind::K4, &[("y", "z")])
            .build()
            .unwrap();
        let u = bounded_unwinding(&m, 0, 5).unwrap();
        assert_eq!(u.model.size(), 3);
        // x/y/z is reached by an a-step then a b-step, so neither agent sees it from x
        let a = u.model.relation(&agent("a")).unwrap();
        let b = u.model.relation(&agent("b")).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(b.edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(u.witness(&m).verify(), Ok(()));
    }

    #[test]
    fn unwinding_rejects_intransitive_relations() {
        let m = Model::builder(["x", "y"])
            .relation("a", FrameKind::WK4, &[("x", "y"), ("y", "x")])
            .build()
            .unwrap();
        assert!(matches!(bounded_unwinding(&m, 0, 2), Err(UnwindError::NotTransitive { .. })));
        assert_eq!(bounded_unwinding(&m, 0, 0).unwrap_err(), UnwindError::ZeroLength);
    }
}
