//! Randomised verification suites. Each suite draws instances from a seeded
//! generator and records every property violation it finds.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::generate::{
    default_signature, random_bijective_model, random_formula, random_model, random_pltl, random_positive_formula,
    random_relation, random_rows, rng,
};
use crate::pltl::{doubling, eval_pltl_finite, holds_at_finite};
use crate::semantics::{
    common_knowledge_open_check, eval_program, extract_successor, holds_at, star_oracle, truth_set, validates_two,
};
use crate::spaces::{
    bounded_unwinding, check_derivative_axioms, irreflexive_resolution, reflexive_transitive_closure,
    restrict_to_open, transitive_closure, validate_frame, FrameKind, Model, PointSet,
};
use crate::syntax::{
    modal_depth, plus_translation, star_translation, top_translation, Agent, Formula,
    PltlFormula,
};

/// Largest carrier drawn by the suites.
const MAX_POINTS: usize = 6;
/// Formulas checked per generated model.
const FORMULAS_PER_MODEL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Axioms,
    Theorem1,
    Theorem2,
    Lemmas,
    Restriction,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Axioms,
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Lemmas,
        Suite::Restriction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Lemmas => "lemmas",
            Suite::Restriction => "restriction",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite `{0}` (expected axioms, theorem1, theorem2, lemmas, restriction or all)")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// Individual property checks performed.
    pub checks: u64,
    /// Instances the construction under test rejects by design.
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, what: String) {
        self.checks += 1;
        self.failures.push(what);
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<12} {} ({} checks, {} skipped)",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks,
            self.skipped
        )?;
        for msg in self.failures.iter().take(10) {
            write!(f, "\n  {msg}")?;
        }
        if self.failures.len() > 10 {
            write!(f, "\n  ... {} more", self.failures.len() - 10)?;
        }
        Ok(())
    }
}

/// Runs `suite` (or all of them) with `iterations` random instances each.
pub fn run_suite(suite: Suite, seed: u64, iterations: usize) -> Vec<SuiteReport> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    suites
        .into_iter()
        .map(|s| {
            // one stream per suite, so `all` repeats the single-suite runs
            let mut r = rng(seed ^ (s as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut report = SuiteReport {
                suite: s.name().to_string(),
                ..SuiteReport::default()
            };
            for i in 0..iterations {
                match s {
                    Suite::Axioms => axioms(&mut r, i, &mut report),
                    Suite::Theorem1 => theorem1(&mut r, i, &mut report),
                    Suite::Theorem2 => theorem2(&mut r, i, &mut report),
                    Suite::Lemmas => lemmas(&mut r, i, &mut report),
                    Suite::Restriction => restriction(&mut r, i, &mut report),
                    Suite::All => unreachable!("expanded above"),
                }
            }
            report
        })
        .collect()
}

fn pick_kind(r: &mut ChaCha8Rng) -> FrameKind {
    FrameKind::ALL[r.gen_range(0..FrameKind::ALL.len())]
}

fn bimodel(r: &mut ChaCha8Rng, kinds: [FrameKind; 2]) -> Model {
    let (agents, atoms) = default_signature();
    let n = r.gen_range(1..=MAX_POINTS);
    let kinds: Vec<(Agent, FrameKind)> = agents.into_iter().zip(kinds).collect();
    random_model(r, n, &kinds, &atoms)
}

fn formula(r: &mut ChaCha8Rng, star: bool) -> Formula {
    let (agents, atoms) = default_signature();
    let size = r.gen_range(1..=12);
    random_formula(r, &agents, &atoms, size, star)
}

/// Derivative-space axioms on every kind, and their failure exactly on
/// relations that are not weakly transitive.
fn axioms(r: &mut ChaCha8Rng, i: usize, rep: &mut SuiteReport) {
    let n = r.gen_range(0..=8);
    let kind = pick_kind(r);
    let rel = random_relation(r, n, kind);
    rep.check(rel.check_derivative_axioms().is_ok(), || {
        format!("#{i}: {kind} frame on {n} points fails the axioms: {:?}", rel.edges().collect::<Vec<_>>())
    });
    if kind == FrameKind::S4 {
        let a = crate::generate::random_set(r, n);
        let c = rel.closure(&a);
        rep.check(a.is_subset(&c) && rel.closure(&c) == c, || {
            format!("#{i}: S4 closure is not increasing and idempotent")
        });
    }

    let avg = r.gen_range(0.5..3.0);
    let rows = random_rows(r, n, avg);
    let edges: Vec<(usize, usize)> = rows.iter().enumerate().flat_map(|(x, s)| s.iter().map(move |y| (x, y))).collect();
    let weak = validate_frame(n, &edges, FrameKind::WK4).is_ok();
    let axioms_hold = check_derivative_axioms(n, &edges).is_ok();
    rep.check(weak == axioms_hold, || {
        format!("#{i}: weak transitivity {weak} but axioms {axioms_hold} for {edges:?}")
    });
}

/// Star translation against reflexive-transitive closure, and invariance
/// of truth under the translation on S4 bimodels; star semantics against
/// the literal least-fixpoint definition.
fn theorem1(r: &mut ChaCha8Rng, i: usize, rep: &mut SuiteReport) {
    let m = bimodel(r, [FrameKind::WK4, FrameKind::WK4]);
    let closed = reflexive_transitive_closure(&m);
    let s4 = bimodel(r, [FrameKind::S4, FrameKind::S4]);
    for _ in 0..FORMULAS_PER_MODEL {
        let f = formula(r, true);
        let fs = star_translation(&f);
        for w in 0..m.size() {
            match (holds_at(&m, w, &fs), holds_at(&closed, w, &f)) {
                (Ok(x), Ok(y)) => rep.check(x == y, || format!("#{i}: star translation of {f} differs at {w}")),
                (Err(e), _) | (_, Err(e)) => rep.error(format!("#{i}: {e}")),
            }
        }
        match (truth_set(&s4, &f), truth_set(&s4, &fs)) {
            (Ok(x), Ok(y)) => rep.check(x.truth_set == y.truth_set, || {
                format!("#{i}: {f} and its star translation differ on an S4 bimodel")
            }),
            (Err(e), _) | (_, Err(e)) => rep.error(format!("#{i}: {e}")),
        }
    }
    let (agents, _) = default_signature();
    let alpha = crate::generate::random_program(r, &agents, 3, true);
    let alpha = crate::syntax::Program::star(alpha);
    let y = crate::generate::random_set(r, m.size());
    match (eval_program(&m, &alpha, &y), star_oracle(&m, &alpha, &y)) {
        (Ok(x), Ok(z)) => rep.check(x == z, || format!("#{i}: {alpha} disagrees with its fixpoint oracle")),
        (Err(e), _) | (_, Err(e)) => rep.error(format!("#{i}: {e}")),
    }
}

/// Plus translation against transitive closure, irreflexive resolution,
/// and bounded unwinding.
fn theorem2(r: &mut ChaCha8Rng, i: usize, rep: &mut SuiteReport) {
    let m = bimodel(r, [FrameKind::WK4, FrameKind::WK4]);
    let closed = transitive_closure(&m);
    for _ in 0..FORMULAS_PER_MODEL {
        let f = formula(r, true);
        let fp = plus_translation(&f);
        for w in 0..m.size() {
            match (holds_at(&m, w, &fp), holds_at(&closed, w, &f)) {
                (Ok(x), Ok(y)) => rep.check(x == y, || format!("#{i}: plus translation of {f} differs at {w}")),
                (Err(e), _) | (_, Err(e)) => rep.error(format!("#{i}: {e}")),
            }
        }
    }

    let (agents, atoms) = default_signature();
    let n = r.gen_range(1..=MAX_POINTS);
    let single = random_model(r, n, &[(agents[0].clone(), FrameKind::WK4)], &atoms);
    resolution_checks(r, i, &single, &agents[..1], rep);
    match irreflexive_resolution(&m) {
        Ok(_) => resolution_checks(r, i, &m, &agents, rep),
        Err(crate::spaces::ResolutionError::SplitConflict { .. }) => rep.skipped += 1,
        Err(e) => rep.error(format!("#{i}: {e}")),
    }

    let k4 = bimodel(r, [FrameKind::K4, FrameKind::K4]);
    let depth = r.gen_range(0..=2);
    let root = r.gen_range(0..k4.size());
    match bounded_unwinding(&k4, root, depth + 1) {
        Ok(u) => {
            for _ in 0..FORMULAS_PER_MODEL {
                let f = random_positive_formula(r, &agents, &atoms, depth);
                debug_assert!(modal_depth(&f) <= depth);
                match (holds_at(&u.model, 0, &f), holds_at(&k4, root, &f)) {
                    (Ok(x), Ok(y)) => rep.check(x == y, || format!("#{i}: unwinding changes {f} at the root")),
                    (Err(e), _) | (_, Err(e)) => rep.error(format!("#{i}: {e}")),
                }
            }
        }
        Err(e) => rep.error(format!("#{i}: {e}")),
    }

    let n = r.gen_range(1..=4);
    let kinds: Vec<(Agent, FrameKind)> = agents.iter().map(|a| (a.clone(), FrameKind::K4)).collect();
    let small = random_model(r, n, &kinds, &atoms);
    let root = r.gen_range(0..n);
    unwinding_morphism(i, &small, root, rep);
}

/// The unwinding long enough to reach everything above `root` maps onto
/// the generated submodel, with the back condition below the bound.
fn unwinding_morphism(i: usize, m: &Model, root: usize, rep: &mut SuiteReport) {
    let below = generated(m, root);
    let (u, sub) = match (bounded_unwinding(m, root, below.count()), restrict_to_open(m, &below, m.agents())) {
        (Ok(u), Ok(sub)) => (u, sub),
        (Err(e), _) => return rep.error(format!("#{i}: {e}")),
        (_, Err(e)) => return rep.error(format!("#{i}: {e}")),
    };
    let index: Vec<usize> = below.iter().collect();
    let mut w = u.witness(&sub);
    w.map = u.label.iter().map(|x| index.binary_search(x).expect("reachable")).collect();
    if let Err(v) = w.verify_where(|v| u.length[v] < u.max_len) {
        rep.error(format!("#{i}: unwinding label map: {v}"));
    } else {
        rep.checks += 1;
    }
}

/// `root` together with everything reachable from it.
fn generated(m: &Model, root: usize) -> PointSet {
    let mut seen = PointSet::singleton(m.size(), root);
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        for (_, rel) in m.relations() {
            for y in rel.successors(x).iter() {
                if !seen.contains(y) {
                    seen.insert(y);
                    stack.push(y);
                }
            }
        }
    }
    seen
}

fn resolution_checks(r: &mut ChaCha8Rng, i: usize, m: &Model, agents: &[Agent], rep: &mut SuiteReport) {
    let (resolved, witness) = match irreflexive_resolution(m) {
        Ok(x) => x,
        Err(e) => return rep.error(format!("#{i}: resolution failed: {e}")),
    };
    rep.check(resolved.size() <= 2 * m.size(), || format!("#{i}: resolution more than doubles the carrier"));
    rep.check(
        resolved.relations().all(|(_, rel)| rel.satisfies(FrameKind::IrreflexiveWK4).is_ok()),
        || format!("#{i}: resolution is not irreflexive and weakly transitive"),
    );
    if let Err(v) = witness.verify() {
        rep.error(format!("#{i}: resolution witness: {v}"));
    }
    let (_, atoms) = default_signature();
    for _ in 0..FORMULAS_PER_MODEL {
        let size = r.gen_range(1..=12);
        let f = random_formula(r, agents, &atoms, size, true);
        let agree = (0..resolved.size())
            .map(|x| Ok(holds_at(&resolved, x, &f)? == holds_at(m, witness.map[x], &f)?))
            .collect::<Result<Vec<bool>, crate::semantics::EvalError>>();
        match agree {
            Ok(v) => rep.check(v.iter().all(|&b| b), || format!("#{i}: resolution changes the truth of {f}")),
            Err(e) => rep.error(format!("#{i}: {e}")),
        }
    }
}

/// Finite unsatisfiability of `F q & ~P q`, and the successor and transfer
/// properties of doubled bijective models.
fn lemmas(r: &mut ChaCha8Rng, i: usize, rep: &mut SuiteReport) {
    let atoms = vec!["q".to_string()];
    let n = r.gen_range(1..=MAX_POINTS);
    let bm = random_bijective_model(r, n, &atoms);
    match eval_pltl_finite(&bm, &PltlFormula::future_not_past("q")) {
        Ok(s) => rep.check(s.is_empty(), || format!("#{i}: F q & ~P q holds on a finite bijective model")),
        Err(e) => rep.error(format!("#{i}: {e}")),
    }

    let (agents, _) = default_signature();
    let (a, b) = (&agents[0], &agents[1]);
    let d = match doubling(&bm, a, b, "whole") {
        Ok(d) => d,
        Err(e) => return rep.error(format!("#{i}: {e}")),
    };
    rep.check(matches!(validates_two(&d.model, a, b, "whole"), Ok(true)), || {
        format!("#{i}: doubled model does not validate Two")
    });
    for agent in [a, b] {
        let opens = d.model.atomic_opens(agent).unwrap_or_default();
        rep.check(
            opens.iter().all(|u| u.count() == 2) && opens.len() == n,
            || format!("#{i}: atomic {agent}-opens are not all pairs"),
        );
    }
    let maps: Vec<Option<Vec<usize>>> = [a, b]
        .iter()
        .map(|g| match extract_successor(&d.model, g) {
            Ok(Ok(s)) => Some(s),
            _ => None,
        })
        .collect();
    match (&maps[0], &maps[1]) {
        (Some(sa), Some(sb)) => {
            rep.check(
                (0..2 * n).all(|x| sa[sa[x]] == x && sb[sb[x]] == x),
                || format!("#{i}: successor maps are not involutions"),
            );
            rep.check(
                (0..n).all(|k| sb[sa[d.embedding[k]]] == d.embedding[bm.succ()[k]]),
                || format!("#{i}: S_b S_a does not follow the permutation"),
            );
        }
        _ => rep.error(format!("#{i}: successor extraction failed on a doubled model")),
    }
    for _ in 0..FORMULAS_PER_MODEL {
        let size = r.gen_range(1..=8);
        let f = random_pltl(r, &atoms, size);
        let top = match top_translation(&f, a, b) {
            Ok(t) => t,
            Err(e) => return rep.error(format!("#{i}: {e}")),
        };
        for k in 0..n {
            match (holds_at(&d.model, d.embedding[k], &top), holds_at_finite(&bm, k, &f)) {
                (Ok(x), Ok(y)) => rep.check(x == y, || format!("#{i}: transfer of {f} fails at {k}")),
                (Err(e), _) => rep.error(format!("#{i}: {e}")),
                (_, Err(e)) => rep.error(format!("#{i}: {e}")),
            }
        }
    }
}

/// Openness of common-knowledge truth sets and truth preservation under
/// restriction to them.
fn restriction(r: &mut ChaCha8Rng, i: usize, rep: &mut SuiteReport) {
    let kinds = [pick_kind(r), pick_kind(r)];
    let m = bimodel(r, kinds);
    let (agents, _) = default_signature();
    let f = formula(r, false);
    let report = match common_knowledge_open_check(&m, &agents, &f) {
        Ok(x) => x,
        Err(e) => return rep.error(format!("#{i}: {e}")),
    };
    rep.check(report.all_open(), || format!("#{i}: truth set of C {f} is not open"));
    if !report.all_open() {
        return;
    }
    check_restriction(r, i, &m, &report.truth_set, &agents, rep);
    let empty = PointSet::empty(m.size());
    check_restriction(r, i, &m, &empty, &agents, rep);
}

fn check_restriction(r: &mut ChaCha8Rng, i: usize, m: &Model, u: &PointSet, agents: &[Agent], rep: &mut SuiteReport) {
    let sub = match restrict_to_open(m, u, agents) {
        Ok(s) => s,
        Err(e) => return rep.error(format!("#{i}: {e}")),
    };
    let keep: Vec<usize> = u.iter().collect();
    for _ in 0..FORMULAS_PER_MODEL {
        let g = formula(r, true);
        let agree = keep
            .iter()
            .enumerate()
            .map(|(k, &x)| Ok(holds_at(&sub, k, &g)? == holds_at(m, x, &g)?))
            .collect::<Result<Vec<bool>, crate::semantics::EvalError>>();
        match agree {
            Ok(v) => rep.check(v.iter().all(|&b| b), || format!("#{i}: restriction changes the truth of {g}")),
            Err(e) => rep.error(format!("#{i}: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_on_a_short_run() {
        for rep in run_suite(Suite::All, 1, 15) {
            assert!(rep.passed(), "{rep}");
            assert!(rep.checks > 0);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite(Suite::Theorem1, 42, 5);
        let b = run_suite(Suite::Theorem1, 42, 5);
        assert_eq!(a, b);
        assert_eq!("restriction".parse::<Suite>(), Ok(Suite::Restriction));
        assert!("lemma".parse::<Suite>().is_err());
    }
}
