//! Truth sets of formulas on finite models.
//!
//! Programs act on point sets: an agent is its derivative, `α;β` composes,
//! `α u β` is pointwise union and `α*` is the least fixpoint of
//! `Z ↦ Y ∪ ⟦α⟧(Z)`.

mod compiled;
mod two;

pub(crate) use compiled::full_mask;
pub use compiled::{CompileError, CompiledFormula, MaskModel};
pub use two::{
    common_knowledge_open_check, extract_successor, two_formula, validates_two, OpenReport,
    SuccessorFailure,
};

use std::collections::HashMap;

use crate::spaces::{Model, ModelError, PointSet};
use crate::syntax::{Formula, Program};

/// Carriers up to this size can be handed to [`star_oracle`].
pub const ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("point {index} outside a carrier of {size} points")]
    PointOutOfRange { index: usize, size: usize },
    #[error("set over {found} points used with a carrier of {expected}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("carrier of {size} points exceeds the limit of {limit}")]
    CarrierTooLarge { size: usize, limit: usize },
    #[error("agents must be distinct, got `{0}` twice")]
    SameAgent(String),
    #[error("common knowledge needs at least one agent")]
    NoAgents,
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownAgent(a) => EvalError::UnknownAgent(a),
            ModelError::UnknownAtom(p) => EvalError::UnknownAtom(p),
            other => unreachable!("evaluation only looks up names: {other}"),
        }
    }
}

fn check_universe(m: &Model, y: &PointSet) -> Result<(), EvalError> {
    if y.universe() != m.size() {
        return Err(EvalError::UniverseMismatch {
            expected: m.size(),
            found: y.universe(),
        });
    }
    Ok(())
}

/// `⟦α⟧(Y)`.
pub fn eval_program(m: &Model, alpha: &Program, y: &PointSet) -> Result<PointSet, EvalError> {
    check_universe(m, y)?;
    program(m, alpha, y)
}

fn program(m: &Model, alpha: &Program, y: &PointSet) -> Result<PointSet, EvalError> {
    Ok(match alpha {
        Program::Atom(a) => m.relation(a)?.derivative(y),
        Program::Seq(l, r) => {
            let inner = program(m, r, y)?;
            program(m, l, &inner)?
        }
        Program::Union(l, r) => &program(m, l, y)? | &program(m, r, y)?,
        Program::Star(body) => {
            let mut z = PointSet::empty(m.size());
            loop {
                let next = y | &program(m, body, &z)?;
                if next == z {
                    break z;
                }
                z = next;
            }
        }
    })
}

/// `⟦α*⟧(Y)` as the literal intersection of every `Z` with
/// `⟦α⟧(Z) ∪ Y ⊆ Z`, enumerating all subsets of the carrier. Stars nested
/// inside `α` are computed the same way.
pub fn star_oracle(m: &Model, alpha: &Program, y: &PointSet) -> Result<PointSet, EvalError> {
    if m.size() > ORACLE_LIMIT {
        return Err(EvalError::CarrierTooLarge {
            size: m.size(),
            limit: ORACLE_LIMIT,
        });
    }
    check_universe(m, y)?;
    oracle_star(m, alpha, y)
}

/// [`star_oracle`] for every `Y` at once: entry `k` is `⟦α*⟧(Y)` for the
/// `Y` with bit mask `k`. The sets `Z` with `⟦α⟧(Z) ⊆ Z` are found once and
/// each entry is the intersection of those containing `Y`.
pub fn star_oracle_table(m: &Model, alpha: &Program) -> Result<Vec<PointSet>, EvalError> {
    let n = m.size();
    if n > ORACLE_LIMIT {
        return Err(EvalError::CarrierTooLarge { size: n, limit: ORACLE_LIMIT });
    }
    let mut closed = Vec::new();
    for z in PointSet::all_subsets(n) {
        if oracle_program(m, alpha, &z)?.is_subset(&z) {
            closed.push(z);
        }
    }
    Ok((0..1u64 << n)
        .map(|k| {
            let y = PointSet::from_mask(n, k);
            let mut meet = PointSet::full(n);
            for z in closed.iter().filter(|z| y.is_subset(z)) {
                meet.intersect_with(z);
            }
            meet
        })
        .collect())
}

fn oracle_program(m: &Model, alpha: &Program, y: &PointSet) -> Result<PointSet, EvalError> {
    Ok(match alpha {
        Program::Atom(a) => m.relation(a)?.derivative(y),
        Program::Seq(l, r) => {
            let inner = oracle_program(m, r, y)?;
            oracle_program(m, l, &inner)?
        }
        Program::Union(l, r) => &oracle_program(m, l, y)? | &oracle_program(m, r, y)?,
        Program::Star(body) => oracle_star(m, body, y)?,
    })
}

fn oracle_star(m: &Model, alpha: &Program, y: &PointSet) -> Result<PointSet, EvalError> {
    let mut meet = PointSet::full(m.size());
    for z in PointSet::all_subsets(m.size()) {
        let image = &oracle_program(m, alpha, &z)? | y;
        if image.is_subset(&z) {
            meet.intersect_with(&z);
        }
    }
    Ok(meet)
}

/// The truth set of a formula together with the truth sets of all of its
/// subformulas.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub formula: Formula,
    pub truth_set: PointSet,
    cache: HashMap<Formula, PointSet>,
}

impl EvalResult {
    /// The cached truth set of a subformula.
    pub fn subformula(&self, f: &Formula) -> Option<&PointSet> {
        self.cache.get(f)
    }

    pub fn cached(&self) -> impl Iterator<Item = (&Formula, &PointSet)> {
        self.cache.iter()
    }

    /// Recomputes every cache entry from its immediate subformulas' cached
    /// values and returns the first entry that disagrees.
    pub fn inconsistent_entry(&self, m: &Model) -> Result<Option<Formula>, EvalError> {
        for (f, set) in &self.cache {
            let get = |g: &Formula| self.cache.get(g).cloned().expect("subformulas are cached");
            let full = m.full_set();
            let recomputed = match f {
                Formula::True => full,
                Formula::False => m.empty_set(),
                Formula::Prop(p) => m.valuation(p)?.clone(),
                Formula::Not(g) => get(g).complement(),
                Formula::And(l, r) => &get(l) & &get(r),
                Formula::Or(l, r) => &get(l) | &get(r),
                Formula::Implies(l, r) => &get(l).complement() | &get(r),
                Formula::Diamond(p, g) => program(m, p, &get(g))?,
                Formula::Box(p, g) => program(m, p, &get(g).complement())?.complement(),
            };
            if recomputed != *set {
                return Ok(Some(f.clone()));
            }
        }
        Ok(None)
    }
}

/// `⟦f⟧` with per-call caching of subformulas.
pub fn truth_set(m: &Model, f: &Formula) -> Result<EvalResult, EvalError> {
    let mut cache = HashMap::new();
    let truth_set = formula(m, f, &mut cache)?;
    Ok(EvalResult {
        formula: f.clone(),
        truth_set,
        cache,
    })
}

fn formula(m: &Model, f: &Formula, cache: &mut HashMap<Formula, PointSet>) -> Result<PointSet, EvalError> {
    if let Some(s) = cache.get(f) {
        return Ok(s.clone());
    }
    let set = match f {
        Formula::True => m.full_set(),
        Formula::False => m.empty_set(),
        Formula::Prop(p) => m.valuation(p)?.clone(),
        Formula::Not(g) => formula(m, g, cache)?.complement(),
        Formula::And(l, r) => &formula(m, l, cache)? & &formula(m, r, cache)?,
        Formula::Or(l, r) => &formula(m, l, cache)? | &formula(m, r, cache)?,
        Formula::Implies(l, r) => &formula(m, l, cache)?.complement() | &formula(m, r, cache)?,
        Formula::Diamond(p, g) => {
            let inner = formula(m, g, cache)?;
            program(m, p, &inner)?
        }
        Formula::Box(p, g) => {
            let inner = formula(m, g, cache)?.complement();
            program(m, p, &inner)?.complement()
        }
    };
    cache.insert(f.clone(), set.clone());
    Ok(set)
}

/// `(m, x) ⊨ f`.
pub fn holds_at(m: &Model, x: usize, f: &Formula) -> Result<bool, EvalError> {
    if x >= m.size() {
        return Err(EvalError::PointOutOfRange {
            index: x,
            size: m.size(),
        });
    }
    Ok(truth_set(m, f)?.truth_set.contains(x))
}

/// `m ⊨ f`: `f` holds at every point.
pub fn validates(m: &Model, f: &Formula) -> Result<bool, EvalError> {
    Ok(truth_set(m, f)?.truth_set.is_full())
}
