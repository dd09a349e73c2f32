//! A formula compiled against a fixed signature into a hash-consed DAG,
//! evaluated on carriers of at most 64 points with `u64` masks. This is the
//! inner loop of the model searches.

use std::collections::HashMap;

use crate::spaces::{Model, PointSet};
use crate::syntax::{Agent, Formula, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
}

/// A model over at most 64 points in mask form: `rows[agent][w]` is the
/// successor mask of `w`, `val[atom]` the valuation mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskModel {
    pub n: usize,
    pub rows: Vec<Vec<u64>>,
    pub val: Vec<u64>,
}

impl MaskModel {
    /// `None` if the carrier exceeds 64 points.
    pub fn from_model(m: &Model) -> Option<MaskModel> {
        if m.size() > 64 {
            return None;
        }
        let rows = m
            .relations()
            .map(|(_, r)| r.rows().iter().map(|s| s.mask().expect("small carrier")).collect())
            .collect();
        let val = m.atoms().iter().map(|a| m.valuation(a).unwrap().mask().unwrap()).collect();
        Some(MaskModel { n: m.size(), rows, val })
    }

    pub fn full(&self) -> u64 {
        full_mask(self.n)
    }

    #[inline]
    pub fn derivative(&self, agent: usize, y: u64) -> u64 {
        let mut out = 0;
        for (w, &row) in self.rows[agent].iter().enumerate() {
            if row & y != 0 {
                out |= 1 << w;
            }
        }
        out
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Atom(usize),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Implies(u32, u32),
    Diamond(u32, u32),
    Box(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PNode {
    Agent(usize),
    Seq(u32, u32),
    Union(u32, u32),
    Star(u32),
}

#[derive(Debug, Clone)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    progs: Vec<PNode>,
    root: u32,
}

struct Builder<'s> {
    agents: &'s [Agent],
    atoms: &'s [String],
    nodes: Vec<Node>,
    node_ids: HashMap<Node, u32>,
    progs: Vec<PNode>,
    prog_ids: HashMap<PNode, u32>,
}

impl Builder<'_> {
    fn node(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.node_ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.node_ids.insert(n, id);
        id
    }

    fn prog_node(&mut self, p: PNode) -> u32 {
        if let Some(&id) = self.prog_ids.get(&p) {
            return id;
        }
        let id = self.progs.len() as u32;
        self.progs.push(p);
        self.prog_ids.insert(p, id);
        id
    }

    fn program(&mut self, p: &Program) -> Result<u32, CompileError> {
        let n = match p {
            Program::Atom(a) => PNode::Agent(
                self.agents
                    .iter()
                    .position(|b| b == a)
                    .ok_or_else(|| CompileError::UnknownAgent(a.to_string()))?,
            ),
            Program::Seq(l, r) => PNode::Seq(self.program(l)?, self.program(r)?),
            Program::Union(l, r) => PNode::Union(self.program(l)?, self.program(r)?),
            Program::Star(b) => PNode::Star(self.program(b)?),
        };
        Ok(self.prog_node(n))
    }

    fn formula(&mut self, f: &Formula) -> Result<u32, CompileError> {
        let n = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Prop(p) => Node::Atom(
                self.atoms
                    .iter()
                    .position(|q| q == p)
                    .ok_or_else(|| CompileError::UnknownAtom(p.clone()))?,
            ),
            Formula::Not(g) => Node::Not(self.formula(g)?),
            Formula::And(l, r) => Node::And(self.formula(l)?, self.formula(r)?),
            Formula::Or(l, r) => Node::Or(self.formula(l)?, self.formula(r)?),
            Formula::Implies(l, r) => Node::Implies(self.formula(l)?, self.formula(r)?),
            Formula::Diamond(p, g) => Node::Diamond(self.program(p)?, self.formula(g)?),
            Formula::Box(p, g) => Node::Box(self.program(p)?, self.formula(g)?),
        };
        Ok(self.node(n))
    }
}

impl CompiledFormula {
    /// Compiles `f` against the given agent and atom order; indices in a
    /// [`MaskModel`] refer to these lists.
    pub fn compile(f: &Formula, agents: &[Agent], atoms: &[String]) -> Result<Self, CompileError> {
        let mut b = Builder {
            agents,
            atoms,
            nodes: Vec::new(),
            node_ids: HashMap::new(),
            progs: Vec::new(),
            prog_ids: HashMap::new(),
        };
        let root = b.formula(f)?;
        Ok(CompiledFormula {
            nodes: b.nodes,
            progs: b.progs,
            root,
        })
    }

    /// Number of distinct subformulas.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn program(&self, m: &MaskModel, id: u32, y: u64) -> u64 {
        match self.progs[id as usize] {
            PNode::Agent(a) => m.derivative(a, y),
            PNode::Seq(l, r) => {
                let inner = self.program(m, r, y);
                self.program(m, l, inner)
            }
            PNode::Union(l, r) => self.program(m, l, y) | self.program(m, r, y),
            PNode::Star(b) => {
                let mut z = 0;
                loop {
                    let next = y | self.program(m, b, z);
                    if next == z {
                        return z;
                    }
                    z = next;
                }
            }
        }
    }

    /// The truth mask. `scratch` is reused between calls to avoid allocation.
    pub fn eval(&self, m: &MaskModel, scratch: &mut Vec<u64>) -> u64 {
        let full = m.full();
        scratch.clear();
        // children always precede their parents in `nodes`
        for &n in &self.nodes {
            let v = match n {
                Node::True => full,
                Node::False => 0,
                Node::Atom(p) => m.val[p],
                Node::Not(g) => !scratch[g as usize] & full,
                Node::And(l, r) => scratch[l as usize] & scratch[r as usize],
                Node::Or(l, r) => scratch[l as usize] | scratch[r as usize],
                Node::Implies(l, r) => (!scratch[l as usize] | scratch[r as usize]) & full,
                Node::Diamond(p, g) => self.program(m, p, scratch[g as usize]),
                Node::Box(p, g) => !self.program(m, p, !scratch[g as usize] & full) & full,
            };
            scratch.push(v);
        }
        scratch[self.root as usize]
    }

    /// Evaluates on a [`Model`] whose agents and atoms are in the compiled
    /// order. Panics on carriers over 64 points.
    pub fn eval_model(&self, m: &Model) -> PointSet {
        let mm = MaskModel::from_model(m).expect("compiled evaluation needs at most 64 points");
        PointSet::from_mask(m.size(), self.eval(&mm, &mut Vec::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::truth_set;
    use crate::spaces::FrameKind;
    use crate::syntax::parse_formula_inferring;

    #[test]
    fn agrees_with_the_reference_evaluator() {
        let m = Model::builder(["x", "y", "z"])
            .relation("a", FrameKind::WK4, &[("x", "y"), ("y", "x"), ("y", "z"), ("x", "z")])
            .relation("b", FrameKind::S4, &[("x", "x"), ("y", "y"), ("z", "z"), ("z", "x")])
            .atom("p", &["z"])
            .atom("q", &["x", "y"])
            .build()
            .unwrap();
        for text in [
            "<a>p",
            "[(a u b)*](q -> <b>p)",
            "<(a;b)*>p & ~[b;a]q",
            "[a*]false | <b*>true",
            "(p -> q) -> <a>(p | q)",
        ] {
            let f = parse_formula_inferring(text).unwrap();
            let c = CompiledFormula::compile(&f, m.agents(), m.atoms()).unwrap();
            assert_eq!(c.eval_model(&m), truth_set(&m, &f).unwrap().truth_set, "{text}");
        }
    }

    #[test]
    fn shares_repeated_subformulas() {
        let f = parse_formula_inferring("<a>p & <a>p | <a>p").unwrap();
        let a: Agent = "a".parse().unwrap();
        let c = CompiledFormula::compile(&f, &[a], &["p".to_string()]).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn unknown_names_are_rejected() {
        let f = parse_formula_inferring("<b>p").unwrap();
        let a: Agent = "a".parse().unwrap();
        assert_eq!(
            CompiledFormula::compile(&f, &[a], &["p".to_string()]).unwrap_err(),
            CompileError::UnknownAgent("b".into())
        );
    }
}
