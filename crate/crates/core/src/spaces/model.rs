use std::collections::{HashMap, HashSet};

use super::{AxiomViolation, FrameKind, PointSet, Relation};
use crate::syntax::{is_identifier, Agent};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("point `{0}` is declared twice")]
    DuplicatePoint(String),
    #[error("{context} refers to undeclared point `{point}`")]
    DanglingPoint { context: String, point: String },
    #[error("point index {index} outside a carrier of {size} points")]
    PointOutOfRange { index: usize, size: usize },
    #[error("`{0}` is not a valid agent or atom name")]
    InvalidName(String),
    #[error("agent `{0}` is declared twice")]
    DuplicateAgent(String),
    #[error("atom `{0}` is declared twice")]
    DuplicateAtom(String),
    #[error("`{0}` is used both as agent and as atom")]
    NameClash(String),
    #[error("relation of agent `{agent}` is not {kind}: {witness}")]
    KindViolation {
        agent: String,
        kind: FrameKind,
        witness: String,
    },
    #[error("relation of agent `{agent}` has {found} points but the carrier has {expected}")]
    SizeMismatch {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("set is not open for agent `{0}`")]
    NotOpen(String),
    #[error("malformed model file: {0}")]
    Json(String),
}

/// A finite polyderivative model: a carrier of named points, one validated
/// relation per agent and a valuation of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    points: Vec<String>,
    agents: Vec<Agent>,
    relations: Vec<Relation>,
    atoms: Vec<String>,
    valuation: Vec<PointSet>,
}

/// Builds a [`Model`] from point names.
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    points: Vec<String>,
    relations: Vec<(String, FrameKind, Vec<(String, String)>)>,
    valuation: Vec<(String, Vec<String>)>,
}

impl ModelBuilder {
    pub fn relation(mut self, agent: &str, kind: FrameKind, edges: &[(&str, &str)]) -> Self {
        self.relations.push((
            agent.to_string(),
            kind,
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        ));
        self
    }

    pub fn atom(mut self, name: &str, members: &[&str]) -> Self {
        self.valuation
            .push((name.to_string(), members.iter().map(|m| m.to_string()).collect()));
        self
    }

    pub(crate) fn relation_owned(mut self, agent: String, kind: FrameKind, edges: Vec<(String, String)>) -> Self {
        self.relations.push((agent, kind, edges));
        self
    }

    pub(crate) fn atom_owned(mut self, name: String, members: Vec<String>) -> Self {
        self.valuation.push((name, members));
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        let n = self.points.len();
        let mut index = HashMap::with_capacity(n);
        for (i, p) in self.points.iter().enumerate() {
            if index.insert(p.as_str(), i).is_some() {
                return Err(ModelError::DuplicatePoint(p.clone()));
            }
        }
        let lookup = |context: &dyn Fn() -> String, p: &str| {
            index.get(p).copied().ok_or_else(|| ModelError::DanglingPoint {
                context: context(),
                point: p.to_string(),
            })
        };

        let mut relations = Vec::with_capacity(self.relations.len());
        for (agent, kind, edges) in &self.relations {
            let mut idx_edges = Vec::with_capacity(edges.len());
            for (s, t) in edges {
                let ctx = || format!("an edge of agent `{agent}`");
                idx_edges.push((lookup(&ctx, s)?, lookup(&ctx, t)?));
            }
            let agent_id = Agent::new(agent).map_err(|_| ModelError::InvalidName(agent.clone()))?;
            let rel = Relation::new(n, *kind, &idx_edges).map_err(|v| ModelError::KindViolation {
                agent: agent.clone(),
                kind: *kind,
                witness: v.describe(|i| self.points[i].clone()),
            })?;
            relations.push((agent_id, rel));
        }

        let mut valuation = Vec::with_capacity(self.valuation.len());
        for (atom, members) in &self.valuation {
            let mut set = PointSet::empty(n);
            for m in members {
                set.insert(lookup(&|| format!("the valuation of `{atom}`"), m)?);
            }
            valuation.push((atom.clone(), set));
        }
        Model::from_parts(self.points, relations, valuation)
    }
}

impl Model {
    pub fn builder<I, S>(points: I) -> ModelBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ModelBuilder {
            points: points.into_iter().map(Into::into).collect(),
            ..ModelBuilder::default()
        }
    }

    /// Assembles a model from already validated relations; checks names,
    /// sizes and agent/atom disjointness.
    pub fn from_parts(
        points: Vec<String>,
        relations: Vec<(Agent, Relation)>,
        valuation: Vec<(String, PointSet)>,
    ) -> Result<Model, ModelError> {
        let n = points.len();
        let mut seen_points = HashSet::with_capacity(n);
        for p in &points {
            if !seen_points.insert(p.as_str()) {
                return Err(ModelError::DuplicatePoint(p.clone()));
            }
        }
        let mut agent_names = HashSet::new();
        for (a, rel) in &relations {
            if !agent_names.insert(a.as_str()) {
                return Err(ModelError::DuplicateAgent(a.to_string()));
            }
            if rel.size() != n {
                return Err(ModelError::SizeMismatch {
                    agent: a.to_string(),
                    expected: n,
                    found: rel.size(),
                });
            }
        }
        let mut atom_names = HashSet::new();
        for (atom, set) in &valuation {
            if !is_identifier(atom) {
                return Err(ModelError::InvalidName(atom.clone()));
            }
            if !atom_names.insert(atom.as_str()) {
                return Err(ModelError::DuplicateAtom(atom.clone()));
            }
            if agent_names.contains(atom.as_str()) {
                return Err(ModelError::NameClash(atom.clone()));
            }
            if set.universe() != n {
                return Err(ModelError::PointOutOfRange {
                    index: set.universe(),
                    size: n,
                });
            }
        }
        let (agents, relations) = relations.into_iter().unzip();
        let (atoms, valuation) = valuation.into_iter().unzip();
        Ok(Model {
            points,
            agents,
            relations,
            atoms,
            valuation,
        })
    }

    /// A model whose points are named `x0, x1, ...`.
    pub fn from_indexed(
        n: usize,
        relations: Vec<(Agent, Relation)>,
        valuation: Vec<(String, PointSet)>,
    ) -> Result<Model, ModelError> {
        Model::from_parts(default_names(n), relations, valuation)
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_index(&self, agent: &Agent) -> Option<usize> {
        self.agents.iter().position(|a| a == agent)
    }

    pub fn relation(&self, agent: &Agent) -> Result<&Relation, ModelError> {
        self.agent_index(agent)
            .map(|i| &self.relations[i])
            .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Agent, &Relation)> {
        self.agents.iter().zip(&self.relations)
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_index(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    pub fn valuation(&self, atom: &str) -> Result<&PointSet, ModelError> {
        self.atom_index(atom)
            .map(|i| &self.valuation[i])
            .ok_or_else(|| ModelError::UnknownAtom(atom.to_string()))
    }

    pub(crate) fn valuation_at(&self, i: usize) -> &PointSet {
        &self.valuation[i]
    }

    /// Returns a copy with `atom` set to `set`, adding the atom if needed.
    pub fn with_valuation(&self, atom: &str, set: PointSet) -> Result<Model, ModelError> {
        if set.universe() != self.size() {
            return Err(ModelError::PointOutOfRange {
                index: set.universe(),
                size: self.size(),
            });
        }
        let mut m = self.clone();
        match m.atom_index(atom) {
            Some(i) => m.valuation[i] = set,
            None => {
                if !is_identifier(atom) {
                    return Err(ModelError::InvalidName(atom.to_string()));
                }
                if m.agents.iter().any(|a| a.as_str() == atom) {
                    return Err(ModelError::NameClash(atom.to_string()));
                }
                m.atoms.push(atom.to_string());
                m.valuation.push(set);
            }
        }
        Ok(m)
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.size())
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.size())
    }

    /// The set of named points.
    pub fn set_of(&self, names: &[&str]) -> Result<PointSet, ModelError> {
        let mut s = self.empty_set();
        for n in names {
            let i = self.point_index(n).ok_or_else(|| ModelError::DanglingPoint {
                context: "a point set".into(),
                point: n.to_string(),
            })?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn names_of(&self, set: &PointSet) -> Vec<&str> {
        set.iter().map(|i| self.point_name(i)).collect()
    }

    pub fn derivative(&self, agent: &Agent, a: &PointSet) -> Result<PointSet, ModelError> {
        Ok(self.relation(agent)?.derivative(a))
    }

    pub fn closure(&self, agent: &Agent, a: &PointSet) -> Result<PointSet, ModelError> {
        Ok(self.relation(agent)?.closure(a))
    }

    pub fn interior(&self, agent: &Agent, a: &PointSet) -> Result<PointSet, ModelError> {
        Ok(self.relation(agent)?.interior(a))
    }

    pub fn is_open(&self, agent: &Agent, a: &PointSet) -> Result<bool, ModelError> {
        Ok(self.relation(agent)?.is_open(a))
    }

    pub fn atomic_opens(&self, agent: &Agent) -> Result<Vec<PointSet>, ModelError> {
        Ok(self.relation(agent)?.atomic_opens())
    }

    pub fn check_derivative_axioms(&self, agent: &Agent) -> Result<Result<(), AxiomViolation>, ModelError> {
        Ok(self.relation(agent)?.check_derivative_axioms())
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}
