//! Acceptance suite: one PASS/FAIL line per criterion, each within its time
//! limit. Runs without the libtest harness so the lines are always shown.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tpdl::generate::{
    default_signature, pltl_formulas_of_size, random_formula, random_model, random_relation, random_rows, random_set,
    rng,
};
use tpdl::pltl::{doubling, eval_pltl_finite, eval_pltl_tail, holds_at_finite, BijectiveModel, TailModel, TailSet};
use tpdl::search::{
    bijective_models, frames, nofmp_experiment, permutations, pltl_finite_search, NofmpConfig, Verdict,
};
use tpdl::semantics::{eval_program, extract_successor, holds_at, star_oracle, star_oracle_table, truth_set, CompiledFormula, MaskModel};
use tpdl::spaces::{
    irreflexive_resolution, reflexive_transitive_closure, restrict_to_open, transitive_closure, FrameKind, Model,
    PointSet, Relation,
};
use tpdl::syntax::{
    parse_formula_inferring, plus_translation, star_translation, top_translation, Agent, Formula, PltlFormula,
    Program,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ab() -> (Agent, Agent) {
    ("a".parse().unwrap(), "b".parse().unwrap())
}

fn relation(n: usize, kind: FrameKind, rows: &[u64]) -> Relation {
    Relation::from_rows(kind, rows.iter().map(|&r| PointSet::from_mask(n, r)).collect()).unwrap()
}

fn bimodel(n: usize, ra: Relation, rb: Relation) -> Model {
    let (a, b) = ab();
    Model::from_indexed(n, vec![(a, ra), (b, rb)], vec![]).unwrap()
}

/// Bodies of the starred programs `a*`, `(a u b)*`, `(a;b)*`.
fn star_bodies() -> Vec<Program> {
    ["a", "a u b", "a;b"]
        .iter()
        .map(|p| match parse_formula_inferring(&format!("<{p}>true")).unwrap() {
            Formula::Diamond(p, _) => p,
            _ => unreachable!(),
        })
        .collect()
}

/// Compares the Kleene iteration with the literal least-fixpoint oracle for
/// every subset `Y`; returns the number of comparisons. The oracle is
/// tabulated over all `Y`, and called directly for one `Y` as well.
fn star_agrees(m: &Model, bodies: &[Program], probe: u64) -> Result<u64, String> {
    let n = m.size();
    let mut count = 0;
    for body in bodies {
        let star = Program::star(body.clone());
        let table = star_oracle_table(m, body).map_err(|e| e.to_string())?;
        for (k, slow) in table.iter().enumerate() {
            let y = PointSet::from_mask(n, k as u64);
            let fast = eval_program(m, &star, &y).map_err(|e| e.to_string())?;
            ensure(&fast == slow, || format!("{star} on Y = {y:?} differs in {}", m.to_json()))?;
            count += 1;
        }
        let y = PointSet::from_mask(n, probe & ((1 << n) - 1));
        let direct = star_oracle(m, body, &y).map_err(|e| e.to_string())?;
        ensure(direct == table[y.mask().unwrap() as usize], || format!("oracle table disagrees on {star}"))?;
    }
    Ok(count)
}

/// Every two-agent model with at most 3 points (all weakly transitive
/// relations, which include every frame kind), every single-relation model
/// on 4 or 5 points for `a*`, and seeded samples of two-agent models of
/// every kind with 4 to 6 points; all `Y` each time.
fn criterion_1() -> Outcome {
    let programs = star_bodies();
    let mut count = 0u64;
    let mut models = 0u64;
    for n in 1..=3 {
        let all = frames(n, FrameKind::WK4, true).unwrap();
        for ra in &all {
            for rb in &all {
                let m = bimodel(n, relation(n, FrameKind::WK4, ra), relation(n, FrameKind::WK4, rb));
                count += star_agrees(&m, &programs, models)?;
                models += 1;
            }
        }
    }
    let exhaustive_pairs = models;
    for n in 4..=5 {
        for ra in frames(n, FrameKind::WK4, true).unwrap() {
            let r = relation(n, FrameKind::WK4, &ra);
            let m = bimodel(n, r.clone(), r);
            count += star_agrees(&m, &programs[..1], models)?;
            models += 1;
        }
    }
    let mut r = rng(1);
    let mut sampled = 0;
    for n in 4..=6 {
        for _ in 0..2000 {
            let ka = FrameKind::ALL[r.gen_range(0..FrameKind::ALL.len())];
            let kb = FrameKind::ALL[r.gen_range(0..FrameKind::ALL.len())];
            let m = bimodel(n, random_relation(&mut r, n, ka), random_relation(&mut r, n, kb));
            count += star_agrees(&m, &programs, sampled)?;
            sampled += 1;
        }
    }
    Ok(format!(
        "{count} comparisons; exhaustive: {exhaustive_pairs} bimodels n<=3, {} single relations n=4,5; sampled: {sampled} bimodels n=4..6",
        models - exhaustive_pairs
    ))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    for i in 0..1000 {
        let n = r.gen_range(1..=8);
        let rel = random_relation(&mut r, n, FrameKind::WK4);
        rel.check_derivative_axioms()
            .map_err(|v| format!("frame {i} ({:?}): {v:?}", rel.edges().collect::<Vec<_>>()))?;
    }
    Ok("1000 weakly transitive frames, n <= 8, exhaustive over all A, B".into())
}

fn formulas(r: &mut ChaCha8Rng, count: usize, agents: &[Agent]) -> Vec<Formula> {
    let (_, atoms) = default_signature();
    (0..count)
        .map(|_| {
            let size = r.gen_range(1..=14);
            random_formula(r, agents, &atoms, size, true)
        })
        .collect()
}

fn random_bimodel(r: &mut ChaCha8Rng, kind: FrameKind) -> Model {
    let (agents, atoms) = default_signature();
    let n = r.gen_range(1..=7);
    let kinds: Vec<(Agent, FrameKind)> = agents.into_iter().map(|a| (a, kind)).collect();
    random_model(r, n, &kinds, &atoms)
}

/// `holds_at(m, w, translate(f)) == holds_at(close(m), w, f)` for all `w`.
fn translation_agrees(
    m: &Model,
    closed: &Model,
    fs: &[Formula],
    translate: fn(&Formula) -> Formula,
) -> Result<u64, String> {
    let mut count = 0;
    for f in fs {
        let t = translate(f);
        for w in 0..m.size() {
            let lhs = holds_at(m, w, &t).map_err(|e| e.to_string())?;
            let rhs = holds_at(closed, w, f).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("{f} at {w} of {}", m.to_json()))?;
            count += 1;
        }
    }
    Ok(count)
}

/// The same comparison on arbitrary relations, which no frame kind admits,
/// through the compiled evaluator.
fn translation_agrees_on_arbitrary_relations(r: &mut ChaCha8Rng, models: usize, plus: bool) -> Result<u64, String> {
    let (agents, atoms) = default_signature();
    let mut count = 0;
    for _ in 0..models {
        let n = r.gen_range(1..=7);
        let mut rows: Vec<Vec<u64>> = (0..2)
            .map(|_| random_rows(r, n, 1.5).iter().map(|s| s.mask().unwrap()).collect())
            .collect();
        let original = MaskModel {
            n,
            rows: rows.clone(),
            val: atoms.iter().map(|_| random_set(r, n).mask().unwrap()).collect(),
        };
        for agent_rows in rows.iter_mut() {
            for k in 0..n {
                for w in 0..n {
                    if agent_rows[w] >> k & 1 == 1 {
                        agent_rows[w] |= agent_rows[k];
                    }
                }
            }
            if !plus {
                for (w, row) in agent_rows.iter_mut().enumerate() {
                    *row |= 1 << w;
                }
            }
        }
        let closed = MaskModel { rows, ..original.clone() };
        for f in formulas(r, 20, &agents) {
            let t = if plus { plus_translation(&f) } else { star_translation(&f) };
            let (cf, ct) = (
                CompiledFormula::compile(&f, &agents, &atoms).unwrap(),
                CompiledFormula::compile(&t, &agents, &atoms).unwrap(),
            );
            let mut scratch = Vec::new();
            let lhs = ct.eval(&original, &mut scratch);
            let rhs = cf.eval(&closed, &mut scratch);
            ensure(lhs == rhs, || format!("{f} on arbitrary relations {:?}", original.rows))?;
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let (agents, _) = default_signature();
    let mut count = 0;
    for _ in 0..500 {
        let m = random_bimodel(&mut r, FrameKind::WK4);
        let fs = formulas(&mut r, 50, &agents);
        count += translation_agrees(&m, &reflexive_transitive_closure(&m), &fs, star_translation)?;
    }
    let extra = translation_agrees_on_arbitrary_relations(&mut r, 300, false)?;
    let mut sets = 0;
    for _ in 0..200 {
        let m = random_bimodel(&mut r, FrameKind::S4);
        for f in formulas(&mut r, 50, &agents) {
            let lhs = truth_set(&m, &f).map_err(|e| e.to_string())?.truth_set;
            let rhs = truth_set(&m, &star_translation(&f)).map_err(|e| e.to_string())?.truth_set;
            ensure(lhs == rhs, || format!("{f} on S4 bimodel {}", m.to_json()))?;
            sets += 1;
        }
    }
    Ok(format!(
        "(i) {count} point checks on 500 weakly transitive bimodels + {extra} truth sets on arbitrary relations; (ii) {sets} truth sets on 200 S4 bimodels"
    ))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let (agents, atoms) = default_signature();
    let mut count = 0;
    for _ in 0..500 {
        let m = random_bimodel(&mut r, FrameKind::WK4);
        let fs = formulas(&mut r, 50, &agents);
        count += translation_agrees(&m, &transitive_closure(&m), &fs, plus_translation)?;
    }
    let extra = translation_agrees_on_arbitrary_relations(&mut r, 300, true)?;
    let a = &agents[..1];
    let mut points = 0;
    for i in 0..200 {
        let n = r.gen_range(1..=8);
        let m = random_model(&mut r, n, &[(a[0].clone(), FrameKind::WK4)], &atoms);
        let (res, witness) = irreflexive_resolution(&m).map_err(|e| format!("frame {i}: {e}"))?;
        ensure(res.size() <= 2 * n, || format!("frame {i}: {} points from {n}", res.size()))?;
        for (_, rel) in res.relations() {
            rel.satisfies(FrameKind::IrreflexiveWK4)
                .map_err(|v| format!("frame {i}: output {v}"))?;
        }
        witness.verify().map_err(|v| format!("frame {i}: {v}"))?;
        for f in formulas(&mut r, 20, a) {
            for x in 0..res.size() {
                let lhs = holds_at(&res, x, &f).map_err(|e| e.to_string())?;
                let rhs = holds_at(&m, witness.map[x], &f).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("frame {i}: {f} at {x}"))?;
                points += 1;
            }
        }
    }
    Ok(format!(
        "{count} point checks + {extra} on arbitrary relations; 200 resolutions with {points} point checks"
    ))
}

fn criterion_5() -> Outcome {
    let phi = PltlFormula::future_not_past("q");
    let z = TailModel::new([("q", TailSet::finite([1]))]);
    let truth = eval_pltl_tail(&z, &phi).map_err(|e| e.to_string())?;
    ensure(truth.contains(0), || format!("witness fails at 0: {truth}"))?;
    let out = pltl_finite_search(&phi, 6, None).map_err(|e| e.to_string())?;
    ensure(out.verdict == Verdict::Unsat { up_to: 6 }, || format!("finite search: {}", out.verdict.label()))?;
    Ok(format!(
        "[[F q & ~P q]] = {truth} on Z with q = {{1}}; UNSAT up to 6 over {} bijective models",
        out.models_checked()
    ))
}

fn criterion_6() -> Outcome {
    let (a, b) = ab();
    let mut count = 0;
    for n in 1..=4 {
        for perm in permutations(n) {
            let succ: Vec<usize> = perm.iter().map(|&p| p as usize).collect();
            let m = BijectiveModel::new(succ.clone(), [("q", vec![0])]).map_err(|e| e.to_string())?;
            let d = doubling(&m, &a, &b, "whole").map_err(|e| e.to_string())?;
            let get = |g: &Agent| match extract_successor(&d.model, g) {
                Ok(Ok(s)) => Ok(s),
                Ok(Err(f)) => Err(format!("succ {succ:?}, agent {g}: {f}")),
                Err(e) => Err(e.to_string()),
            };
            let (sa, sb) = (get(&a)?, get(&b)?);
            ensure((0..2 * n).all(|x| sa[sa[x]] == x && sb[sb[x]] == x), || {
                format!("succ {succ:?}: not involutions")
            })?;
            ensure((0..n).all(|i| sb[sa[d.embedding[i]]] == d.embedding[succ[i]]), || {
                format!("succ {succ:?}: composite does not follow the permutation")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} permutations, n <= 4"))
}

fn criterion_7() -> Outcome {
    let (a, b) = ab();
    let q = vec!["q".to_string()];
    let all: Vec<(PltlFormula, Formula)> = (1..=5)
        .flat_map(|s| pltl_formulas_of_size(&q, s))
        .map(|f| {
            let t = top_translation(&f, &a, &b).unwrap();
            (f, t)
        })
        .collect();
    let mut models = 0;
    let mut checks = 0u64;
    for n in 1..=3 {
        let mut failure = None;
        let _ = bijective_models(n, &q, false, |m| {
            models += 1;
            let d = doubling(m, &a, &b, "whole").unwrap();
            for (f, t) in &all {
                let pltl = eval_pltl_finite(m, f).unwrap();
                let top = truth_set(&d.model, t).unwrap().truth_set;
                for i in 0..n {
                    let oracle = holds_at_finite(m, i, f).unwrap();
                    checks += 1;
                    if top.contains(d.embedding[i]) != pltl.contains(i) || pltl.contains(i) != oracle {
                        failure = Some(format!("{f} at {i} of succ {:?}", m.succ()));
                        return std::ops::ControlFlow::Break(());
                    }
                }
            }
            std::ops::ControlFlow::Continue(())
        });
        if let Some(f) = failure {
            return Err(f);
        }
    }
    Ok(format!("{} formulas x {models} models, {checks} point checks", all.len()))
}

fn criterion_8() -> Outcome {
    let config = NofmpConfig {
        max_size: 6,
        wk4_max_size: 4,
        cross_check_max_size: 4,
        budget: None,
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let report = nofmp_experiment(&config).map_err(|e| e.to_string())?;
    let pairs: Vec<usize> = report.reports[0].results.iter().map(|r| r.n).collect();
    ensure(pairs == [2, 4, 6], || format!("pair sizes {pairs:?}"))?;
    let wk4 = report.reports.iter().find(|r| r.class == "wk4").ok_or("no wk4 report")?;
    let wk4_sizes: Vec<usize> = wk4.results.iter().map(|r| r.n).collect();
    ensure(wk4_sizes == [1, 2, 3, 4], || format!("wk4 sizes {wk4_sizes:?}"))?;
    ensure(report.reproduces_theorem(), || format!("\n{report}"))?;
    let total: u64 = report.reports.iter().flat_map(|r| &r.results).map(|r| r.models_checked).sum();
    Ok(format!(
        "UNSAT on pair bimodels n in {{2,4,6}} and all wk4 bimodels n <= 4 ({total} models); integer witness holds"
    ))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let (agents, atoms) = default_signature();
    let mut count = 0;
    let mut nonempty = 0;
    for i in 0..300 {
        let n = r.gen_range(1..=7);
        let kinds: Vec<(Agent, FrameKind)> = agents
            .iter()
            .map(|a| (a.clone(), FrameKind::ALL[r.gen_range(0..FrameKind::ALL.len())]))
            .collect();
        let m = random_model(&mut r, n, &kinds, &atoms);
        // redraw a few times to avoid the trivial case of an empty set
        let mut ck = Formula::True;
        let mut u = PointSet::empty(n);
        for _ in 0..20 {
            let size = r.gen_range(1..=10);
            let f = random_formula(&mut r, &agents, &atoms, size, true);
            ck = Formula::common_knowledge(agents.iter().cloned(), f).unwrap();
            u = truth_set(&m, &ck).map_err(|e| e.to_string())?.truth_set;
            if !u.is_empty() {
                break;
            }
        }
        nonempty += usize::from(!u.is_empty());
        for a in &agents {
            ensure(m.relation(a).unwrap().is_open(&u), || format!("model {i}: [[{ck}]] not open for {a}"))?;
        }
        let sub = restrict_to_open(&m, &u, &agents).map_err(|e| format!("model {i}: {e}"))?;
        let keep: Vec<usize> = u.iter().collect();
        for g in formulas(&mut r, 20, &agents) {
            for (k, &x) in keep.iter().enumerate() {
                let lhs = holds_at(&sub, k, &g).map_err(|e| e.to_string())?;
                let rhs = holds_at(&m, x, &g).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("model {i}: {g} at {x}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("300 models ({nonempty} with a nonempty open set), {count} point checks"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("star semantics = least-fixpoint oracle", criterion_1, 60),
        ("derivative-space axioms on weakly transitive frames", criterion_2, 10),
        ("star translation vs reflexive-transitive closure", criterion_3, 60),
        ("plus translation and irreflexive resolution", criterion_4, 60),
        ("F q & ~P q: integer witness, no finite bijective model", criterion_5, 120),
        ("successor maps of doubled permutations", criterion_6, 30),
        ("truth transfer to doubled models", criterion_7, 120),
        ("no finite model of the non-FMP formula", criterion_8, 600),
        ("openness of common knowledge and restriction", criterion_9, 60),
    ];
    // `cargo test --test acceptance -- 3 7` runs only criteria 3 and 7
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let (verdict, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over the {limit} s limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {}: {verdict} [{:.1} s / {limit} s] {name}: {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    if only.is_empty() {
        println!("all 9 criteria passed");
    }
}
