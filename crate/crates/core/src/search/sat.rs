use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use super::frames::{frames, is_minimal, permutations, permute, stabilizer, Rows, RELATIONAL_LIMIT, SYMMETRY_LIMIT};
use super::{SearchError, SearchOutcome, SearchSpec, SizeStats, Verdict, SEARCH_LIMIT};
use crate::semantics::{full_mask, holds_at, CompiledFormula, MaskModel};
use crate::spaces::{FrameKind, Model, PointSet, Relation};

fn validate(spec: &SearchSpec) -> Result<(), SearchError> {
    if spec.kinds.is_empty() {
        return Err(SearchError::NoAgents);
    }
    if spec.max_size > SEARCH_LIMIT {
        return Err(SearchError::TooLarge(spec.max_size));
    }
    let mut seen = BTreeSet::new();
    for (a, kind) in &spec.kinds {
        if !seen.insert(a.as_str()) {
            return Err(SearchError::DuplicateAgent(a.to_string()));
        }
        if spec.atoms.iter().any(|p| p == a.as_str()) {
            return Err(SearchError::NameClash(a.to_string()));
        }
        let relational = !matches!(kind, FrameKind::Equivalence | FrameKind::MonadicDerivative);
        if relational && spec.max_size > RELATIONAL_LIMIT {
            return Err(SearchError::KindTooLarge {
                kind: *kind,
                n: spec.max_size,
                limit: RELATIONAL_LIMIT,
            });
        }
    }
    if let Some(p) = spec.formula.atoms().into_iter().find(|p| !spec.atoms.contains(p)) {
        return Err(SearchError::MissingAtom(p));
    }
    Ok(())
}

/// The compiled formula split into top-level conjuncts, each attached to
/// the number of assigned atoms after which it can be evaluated.
struct Plan {
    /// Relevant atoms in assignment order.
    atoms: Vec<String>,
    /// `ready[j]`: conjuncts whose atoms are all among the first `j`.
    ready: Vec<Vec<CompiledFormula>>,
    /// Listed atoms that do not occur in the formula.
    idle_atoms: usize,
}

fn plan(spec: &SearchSpec) -> Result<Plan, SearchError> {
    let conjuncts = spec.formula.conjuncts();
    let atom_sets: Vec<BTreeSet<String>> = conjuncts.iter().map(|c| c.atoms()).collect();
    let used = spec.formula.atoms();
    // atoms of small conjuncts first, so that strong filters apply early
    let mut atoms: Vec<String> = spec.atoms.iter().filter(|p| used.contains(*p)).cloned().collect();
    let key = |p: &String| atom_sets.iter().filter(|s| s.contains(p)).map(|s| s.len()).min();
    atoms.sort_by_key(|p| key(p));
    let agents: Vec<_> = spec.kinds.iter().map(|(a, _)| a.clone()).collect();
    let mut ready = vec![Vec::new(); atoms.len() + 1];
    for (c, set) in conjuncts.iter().zip(&atom_sets) {
        let at = set
            .iter()
            .map(|p| atoms.iter().position(|q| q == p).expect("covered") + 1)
            .max()
            .unwrap_or(0);
        ready[at].push(CompiledFormula::compile(c, &agents, &atoms)?);
    }
    Ok(Plan {
        idle_atoms: spec.atoms.len() - atoms.len(),
        atoms,
        ready,
    })
}

#[derive(Default)]
struct Batch {
    frames: u64,
    covered: u64,
    pruned: u64,
    sat: Option<(Vec<Rows>, Vec<u64>, usize)>,
}

struct Ctx<'a> {
    n: usize,
    per_agent: &'a [Vec<Rows>],
    sym: bool,
    plan: &'a Plan,
    deadline: Option<Instant>,
    /// Lowest batch index with a satisfying model so far.
    best: &'a AtomicUsize,
    timed_out: &'a AtomicBool,
}

impl Ctx<'_> {
    fn models_from(&self, assigned: usize) -> u64 {
        let free = (self.plan.atoms.len() - assigned + self.plan.idle_atoms) * self.n;
        1u64.checked_shl(free as u32).unwrap_or(u64::MAX)
    }

    fn stop(&self, batch: usize) -> bool {
        if self.best.load(Ordering::Relaxed) < batch || self.timed_out.load(Ordering::Relaxed) {
            return true;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn run_batch(&self, batch: usize, first: &Rows, perms: &[Vec<u8>]) -> Batch {
        let mut mm = MaskModel {
            n: self.n,
            rows: vec![first.clone(); self.per_agent.len()],
            val: vec![0; self.plan.atoms.len()],
        };
        let stab = if self.sym { stabilizer(first, perms) } else { Vec::new() };
        let mut out = Batch::default();
        self.agents(1, &stab, &mut mm, &mut out, batch, &mut Vec::new());
        out
    }

    /// Chooses the relation of agent `k` and beyond; false stops the batch.
    fn agents(&self, k: usize, stab: &[Vec<u8>], mm: &mut MaskModel, out: &mut Batch, batch: usize, scratch: &mut Vec<u64>) -> bool {
        if k == self.per_agent.len() {
            if self.stop(batch) {
                return false;
            }
            out.frames += 1;
            if let Some(points) = self.valuations(0, full_mask(self.n), mm, out, scratch) {
                out.sat = Some((mm.rows.clone(), mm.val.clone(), points.trailing_zeros() as usize));
                self.best.fetch_min(batch, Ordering::Relaxed);
                return false;
            }
            return true;
        }
        for cand in &self.per_agent[k] {
            if self.sym && !is_minimal(cand, stab) {
                continue;
            }
            mm.rows[k].clone_from(cand);
            let next: Vec<Vec<u8>> = if self.sym {
                stab.iter().filter(|p| permute(cand, p) == *cand).cloned().collect()
            } else {
                Vec::new()
            };
            if !self.agents(k + 1, &next, mm, out, batch, scratch) {
                return false;
            }
        }
        true
    }

    /// Assigns atoms from `j` on; `alive` is the set of points where every
    /// conjunct evaluated so far holds. Returns it once all are assigned.
    fn valuations(&self, j: usize, alive: u64, mm: &mut MaskModel, out: &mut Batch, scratch: &mut Vec<u64>) -> Option<u64> {
        let mut alive = alive;
        if j == 0 {
            for c in &self.plan.ready[0] {
                alive &= c.eval(mm, scratch);
            }
            if alive == 0 {
                let cut = self.models_from(0);
                out.covered = out.covered.saturating_add(cut);
                out.pruned = out.pruned.saturating_add(cut);
                return None;
            }
        }
        if j == self.plan.atoms.len() {
            out.covered = out.covered.saturating_add(self.models_from(j));
            return Some(alive);
        }
        for v in 0..=full_mask(self.n) {
            mm.val[j] = v;
            let mut here = alive;
            for c in &self.plan.ready[j + 1] {
                here &= c.eval(mm, scratch);
                if here == 0 {
                    break;
                }
            }
            if here == 0 {
                let cut = self.models_from(j + 1);
                out.covered = out.covered.saturating_add(cut);
                out.pruned = out.pruned.saturating_add(cut);
                continue;
            }
            if let Some(found) = self.valuations(j + 1, here, mm, out, scratch) {
                return Some(found);
            }
        }
        None
    }
}

fn witness(spec: &SearchSpec, plan: &Plan, n: usize, rows: &[Rows], val: &[u64]) -> Result<Model, SearchError> {
    let reject = |e: &dyn std::fmt::Display| SearchError::WitnessRejected(e.to_string());
    let relations = spec
        .kinds
        .iter()
        .zip(rows)
        .map(|((a, kind), r)| {
            let rows = r.iter().map(|&m| PointSet::from_mask(n, m)).collect();
            Relation::from_rows(*kind, rows).map(|rel| (a.clone(), rel)).map_err(|e| reject(&e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let valuation = spec
        .atoms
        .iter()
        .map(|p| {
            let mask = plan.atoms.iter().position(|q| q == p).map_or(0, |i| val[i]);
            (p.clone(), PointSet::from_mask(n, mask))
        })
        .collect();
    Model::from_indexed(n, relations, valuation).map_err(|e| reject(&e))
}

/// Searches for a model of `spec.formula` over carriers of
/// `spec.min_size..=spec.max_size` points.
///
/// Frames of the first agent are taken up to isomorphism, each later agent
/// up to the automorphisms fixing the earlier ones, so every isomorphism
/// class of frame tuples is visited once (on carriers of at most 8 points).
/// Batches, one per first-agent frame, are shared among `spec.jobs`
/// workers; the satisfying model from the lowest batch is reported, so the
/// verdict and witness do not depend on the number of jobs.
pub fn sat_search(spec: &SearchSpec) -> Result<SearchOutcome, SearchError> {
    validate(spec)?;
    let plan = plan(spec)?;
    let start = Instant::now();
    let deadline = spec.budget.map(|b| start + b);
    let mut sizes = Vec::new();
    for n in spec.min_size.max(1)..=spec.max_size {
        let size_start = Instant::now();
        let mut cache: HashMap<FrameKind, Vec<Rows>> = HashMap::new();
        for (_, kind) in &spec.kinds {
            if !cache.contains_key(kind) {
                let f = frames(n, *kind, spec.allow_singletons).expect("sizes validated");
                cache.insert(*kind, f);
            }
        }
        let per_agent: Vec<Vec<Rows>> = spec.kinds.iter().map(|(_, k)| cache[k].clone()).collect();
        let sym = spec.symmetry && n <= SYMMETRY_LIMIT;
        let perms = if sym { permutations(n) } else { Vec::new() };
        let firsts: Vec<&Rows> = per_agent[0].iter().filter(|r| !sym || is_minimal(r, &perms)).collect();

        let best = AtomicUsize::new(usize::MAX);
        let timed_out = AtomicBool::new(false);
        let next = AtomicUsize::new(0);
        let results = Mutex::new(Vec::new());
        let ctx = Ctx {
            n,
            per_agent: &per_agent,
            sym,
            plan: &plan,
            deadline,
            best: &best,
            timed_out: &timed_out,
        };
        thread::scope(|s| {
            for _ in 0..spec.jobs.max(1) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= firsts.len() || ctx.stop(i) {
                        break;
                    }
                    let b = ctx.run_batch(i, firsts[i], &perms);
                    results.lock().expect("worker panicked").push((i, b));
                });
            }
        });
        let mut results = results.into_inner().expect("worker panicked");
        results.sort_by_key(|(i, _)| *i);
        let mut stats = SizeStats {
            n,
            verdict: "UNSAT",
            frames: 0,
            models_checked: 0,
            pruned: 0,
            ms: 0,
        };
        for (_, b) in &results {
            stats.frames += b.frames;
            stats.models_checked = stats.models_checked.saturating_add(b.covered);
            stats.pruned = stats.pruned.saturating_add(b.pruned);
        }
        stats.ms = size_start.elapsed().as_millis() as u64;
        if let Some((_, b)) = results.iter().find(|(_, b)| b.sat.is_some()) {
            let (rows, val, point) = b.sat.as_ref().expect("found");
            let model = witness(spec, &plan, n, rows, val)?;
            if !holds_at(&model, *point, &spec.formula)? {
                return Err(SearchError::WitnessRejected(format!(
                    "formula fails at point {point} of the reported model"
                )));
            }
            stats.verdict = "SAT";
            sizes.push(stats);
            return Ok(SearchOutcome {
                verdict: Verdict::Sat { model, point: *point },
                sizes,
                elapsed: start.elapsed(),
            });
        }
        if timed_out.load(Ordering::Relaxed) {
            stats.verdict = "TIMEOUT";
            sizes.push(stats);
            return Ok(SearchOutcome {
                verdict: Verdict::Timeout,
                sizes,
                elapsed: start.elapsed(),
            });
        }
        sizes.push(stats);
    }
    Ok(SearchOutcome {
        verdict: Verdict::Unsat { up_to: spec.max_size },
        sizes,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula_inferring, Agent};
    use std::time::Duration;

    fn agent(s: &str) -> Agent {
        s.parse().unwrap()
    }

    #[test]
    fn diamond_is_satisfied_on_a_cluster() {
        let f = parse_formula_inferring("<a>p").unwrap();
        let spec = SearchSpec::uniform(f.clone(), &[agent("a")], FrameKind::MonadicDerivative, 2);
        let out = sat_search(&spec).unwrap();
        let Verdict::Sat { model, point } = out.verdict else { panic!("expected SAT") };
        assert_eq!(model.size(), 2);
        assert_eq!(model.valuation("p").unwrap().count(), 1);
        assert!(holds_at(&model, point, &f).unwrap());
        // size 1 has no pair frames
        assert_eq!(out.sizes[0].frames, 0);
    }

    #[test]
    fn contradiction_is_unsat() {
        let f = parse_formula_inferring("p & ~p").unwrap();
        for kind in [FrameKind::WK4, FrameKind::Equivalence, FrameKind::MonadicDerivative] {
            let spec = SearchSpec::uniform(f.clone(), &[agent("a")], kind, 4);
            assert_eq!(sat_search(&spec).unwrap().verdict, Verdict::Unsat { up_to: 4 });
        }
    }

    #[test]
    fn symmetry_and_jobs_do_not_change_verdicts() {
        let texts = ["<a>p & [b]~p", "<a;b>p & ~<b;a>p", "[a*](p -> <b>~p) & p", "<(a u b)*>q & [a]~q & ~q"];
        for text in texts {
            let f = parse_formula_inferring(text).unwrap();
            for kind in [FrameKind::WK4, FrameKind::S4, FrameKind::MonadicDerivative] {
                let mut spec = SearchSpec::uniform(f.clone(), &[agent("a"), agent("b")], kind, 3);
                spec.allow_singletons = true;
                let reduced = sat_search(&spec).unwrap();
                spec.symmetry = false;
                let full = sat_search(&spec).unwrap();
                spec.jobs = 3;
                let parallel = sat_search(&spec).unwrap();
                assert_eq!(reduced.verdict.label(), full.verdict.label(), "{text} {kind}");
                assert_eq!(full.verdict, parallel.verdict, "{text} {kind}");
                assert_eq!(reduced.sizes.len(), full.sizes.len());
            }
        }
    }

    #[test]
    fn unreduced_search_covers_every_labelled_model() {
        let f = parse_formula_inferring("p & ~p").unwrap();
        let mut spec = SearchSpec::uniform(f, &[agent("a")], FrameKind::WK4, 3);
        spec.symmetry = false;
        let out = sat_search(&spec).unwrap();
        // 1, 2 and 3 points: 2, 16 and 232 weakly transitive relations
        let expected = [2 * 2, 16 * 4, 232 * 8];
        for (s, e) in out.sizes.iter().zip(expected) {
            assert_eq!(s.models_checked, e);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let f = parse_formula_inferring("<a>p").unwrap();
        let big = SearchSpec::uniform(f.clone(), &[agent("a")], FrameKind::MonadicDerivative, 13);
        assert_eq!(sat_search(&big).unwrap_err(), SearchError::TooLarge(13));
        let wk4 = SearchSpec::uniform(f.clone(), &[agent("a")], FrameKind::WK4, 6);
        assert!(matches!(sat_search(&wk4), Err(SearchError::KindTooLarge { .. })));
        let mut missing = SearchSpec::uniform(f.clone(), &[agent("a")], FrameKind::WK4, 2);
        missing.atoms.clear();
        assert_eq!(sat_search(&missing).unwrap_err(), SearchError::MissingAtom("p".into()));
        let other = SearchSpec::uniform(f, &[agent("b")], FrameKind::WK4, 2);
        assert!(matches!(sat_search(&other), Err(SearchError::Compile(_))));
    }

    #[test]
    fn budget_exhaustion_is_a_timeout() {
        let f = parse_formula_inferring("p & ~p").unwrap();
        let mut spec = SearchSpec::uniform(f, &[agent("a"), agent("b")], FrameKind::WK4, 4);
        spec.budget = Some(Duration::ZERO);
        let out = sat_search(&spec).unwrap();
        assert_eq!(out.verdict, Verdict::Timeout);
        assert_eq!(out.sizes.last().unwrap().verdict, "TIMEOUT");
    }
}
