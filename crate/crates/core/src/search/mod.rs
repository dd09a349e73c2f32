//! Bounded finite-model search.
//!
//! Carriers are tried in increasing size; every satisfying model found is
//! re-checked with the reference evaluator before it is reported.

mod frames;
mod nofmp;
mod pltl;
mod sat;

pub use frames::{frames, permutations, rows_satisfy, Rows, RELATIONAL_LIMIT, SYMMETRY_LIMIT};
pub use nofmp::{nofmp_experiment, nofmp_formula, InfiniteWitness, NofmpConfig, NofmpReport};
pub use pltl::{bijective_models, pltl_finite_search};
pub use sat::sat_search;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::semantics::{CompileError, EvalError};
use crate::spaces::{FrameKind, Model};
use crate::syntax::{Agent, Formula};

/// Searches refuse carriers above this size.
pub const SEARCH_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("carrier size {0} exceeds the search limit of 12")]
    TooLarge(usize),
    #[error("{kind} frames are only enumerated up to {limit} points, not {n}")]
    KindTooLarge { kind: FrameKind, n: usize, limit: usize },
    #[error("no agents given")]
    NoAgents,
    #[error("agent `{0}` is listed twice")]
    DuplicateAgent(String),
    #[error("atom `{0}` of the formula is not in the atom list")]
    MissingAtom(String),
    #[error("`{0}` is used both as agent and as atom")]
    NameClash(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// A reported witness failed the independent re-check. This is a bug.
    #[error("witness rejected by the reference evaluator: {0}")]
    WitnessRejected(String),
}

/// What to search for and where.
#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub formula: Formula,
    /// Frame kind of each agent's relation.
    pub kinds: Vec<(Agent, FrameKind)>,
    pub min_size: usize,
    pub max_size: usize,
    /// Atoms to enumerate valuations for; must cover the formula's atoms.
    pub atoms: Vec<String>,
    /// Skip frames isomorphic to one already visited (carriers up to 8 points).
    pub symmetry: bool,
    pub budget: Option<Duration>,
    /// Allow isolated points in monadic derivative frames.
    pub allow_singletons: bool,
    pub jobs: usize,
}

impl SearchSpec {
    /// Carriers `1..=max_size`, the formula's atoms, symmetry on, one job.
    pub fn new(formula: Formula, kinds: Vec<(Agent, FrameKind)>, max_size: usize) -> SearchSpec {
        let atoms = formula.atoms().into_iter().collect();
        SearchSpec {
            formula,
            kinds,
            min_size: 1,
            max_size,
            atoms,
            symmetry: true,
            budget: None,
            allow_singletons: false,
            jobs: 1,
        }
    }

    /// The same kind for every agent.
    pub fn uniform(formula: Formula, agents: &[Agent], kind: FrameKind, max_size: usize) -> SearchSpec {
        SearchSpec::new(formula, agents.iter().map(|a| (a.clone(), kind)).collect(), max_size)
    }

    /// Name of the model class, e.g. `monadic-derivative` or `a:wk4,b:s4`.
    pub fn class_name(&self) -> String {
        let first = self.kinds.first().map(|(_, k)| *k);
        if self.kinds.iter().all(|(_, k)| Some(*k) == first) {
            if let Some(k) = first {
                return k.to_string();
            }
        }
        self.kinds
            .iter()
            .map(|(a, k)| format!("{a}:{k}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<M> {
    Sat { model: M, point: usize },
    /// No model with at most `up_to` points.
    Unsat { up_to: usize },
    Timeout,
}

impl<M> Verdict<M> {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat { .. } => "SAT",
            Verdict::Unsat { .. } => "UNSAT",
            Verdict::Timeout => "TIMEOUT",
        }
    }
}

/// Per-size statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeStats {
    pub n: usize,
    pub verdict: &'static str,
    /// Frame tuples visited after isomorphism pruning.
    pub frames: u64,
    /// Complete models covered, whether evaluated or cut off early.
    pub models_checked: u64,
    /// Of those, the models decided by a failing partial valuation.
    pub pruned: u64,
    pub ms: u64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<M = Model> {
    pub verdict: Verdict<M>,
    pub sizes: Vec<SizeStats>,
    pub elapsed: Duration,
}

impl<M> SearchOutcome<M> {
    pub fn models_checked(&self) -> u64 {
        self.sizes.iter().map(|s| s.models_checked).sum()
    }

    pub fn report(&self, formula: impl fmt::Display, class: &str) -> Report {
        Report {
            formula: formula.to_string(),
            class: class.to_string(),
            results: self
                .sizes
                .iter()
                .map(|s| ResultRow {
                    n: s.n,
                    verdict: s.verdict.to_string(),
                    models_checked: s.models_checked,
                    ms: s.ms,
                })
                .collect(),
        }
    }
}

/// The machine-readable search report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub formula: String,
    pub class: String,
    pub results: Vec<ResultRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub n: usize,
    pub verdict: String,
    pub models_checked: u64,
    pub ms: u64,
}

impl Report {
    pub fn all_unsat(&self) -> bool {
        !self.results.is_empty() && self.results.iter().all(|r| r.verdict == "UNSAT")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "formula: {}", self.formula)?;
        writeln!(f, "class:   {}", self.class)?;
        writeln!(f, "{:>4}  {:<8} {:>16} {:>10}", "n", "verdict", "models", "ms")?;
        for r in &self.results {
            writeln!(f, "{:>4}  {:<8} {:>16} {:>10}", r.n, r.verdict, r.models_checked, r.ms)?;
        }
        Ok(())
    }
}
