use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::frames::{frames, is_minimal, permutations, stabilizer, Rows, SYMMETRY_LIMIT};
use super::{sat_search, Report, ResultRow, SearchError, SearchSpec, SEARCH_LIMIT};
use crate::pltl::{eval_pltl_tail, TailModel, TailSet};
use crate::semantics::{holds_at, two_formula, CompiledFormula, MaskModel};
use crate::spaces::{FrameKind, Model, PointSet, Relation};
use crate::syntax::{top_translation, Agent, Formula, PltlFormula};

/// `(F q & ~P q)^top & C{a,b} Two` over agents `a`, `b` and atoms `whole`, `q`.
pub fn nofmp_formula(a: &Agent, b: &Agent) -> Formula {
    let phi = top_translation(&PltlFormula::future_not_past("q"), a, b).expect("distinct agents");
    let two = two_formula(a, b, "whole").expect("distinct agents");
    let ck = Formula::common_knowledge([a.clone(), b.clone()], two).expect("two agents");
    Formula::and(phi, ck)
}

#[derive(Debug, Clone)]
pub struct NofmpConfig {
    /// Largest carrier for the pair-model pipeline; odd values round down.
    pub max_size: usize,
    /// Largest carrier for the search over all weakly transitive bimodels.
    pub wk4_max_size: usize,
    /// Largest carrier on which the pipeline is compared against plain
    /// enumeration of pair bimodels without the `whole` filter.
    pub cross_check_max_size: usize,
    pub budget: Option<Duration>,
    pub jobs: usize,
}

impl Default for NofmpConfig {
    fn default() -> Self {
        NofmpConfig {
            max_size: 6,
            wk4_max_size: 4,
            cross_check_max_size: 4,
            budget: None,
            jobs: 1,
        }
    }
}

/// The integer model with `q = {1}`, where the PLTL witness holds at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteWitness {
    pub formula: String,
    pub valuation: String,
    pub truth_set: String,
    pub point: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NofmpReport {
    pub reports: Vec<Report>,
    pub infinite_witness: InfiniteWitness,
    /// A finite model of the formula, which the theorem says cannot exist.
    #[serde(skip)]
    pub counterexample: Option<(Model, usize)>,
}

impl NofmpReport {
    /// Every finite search came back UNSAT and the integer witness holds.
    pub fn reproduces_theorem(&self) -> bool {
        self.counterexample.is_none()
            && self.infinite_witness.holds
            && self.reports.iter().all(|r| r.all_unsat())
    }
}

impl fmt::Display for NofmpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        let w = &self.infinite_witness;
        writeln!(
            f,
            "infinite witness: Z with {}: [[{}]] = {}, point {}: {}",
            w.valuation,
            w.formula,
            w.truth_set,
            w.point,
            if w.holds { "SAT" } else { "not satisfied" }
        )?;
        if let Some((m, x)) = &self.counterexample {
            writeln!(f, "COUNTEREXAMPLE at point {}:\n{}", m.point_name(*x), m.to_json())?;
        }
        Ok(())
    }
}

fn infinite_witness() -> InfiniteWitness {
    let phi = PltlFormula::future_not_past("q");
    let m = TailModel::new([("q", TailSet::finite([1]))]);
    let truth = eval_pltl_tail(&m, &phi).expect("q is declared");
    InfiniteWitness {
        formula: phi.to_string(),
        valuation: "q = {1}".to_string(),
        truth_set: truth.to_string(),
        point: 0,
        holds: truth.contains(0),
    }
}

fn bichromatic(whole: u64, rows: &[u64]) -> bool {
    rows.iter().enumerate().all(|(w, &r)| {
        let mine = whole >> w & 1;
        let mut succ = r;
        while succ != 0 {
            let v = succ.trailing_zeros();
            succ &= succ - 1;
            if whole >> v & 1 == mine {
                return false;
            }
        }
        true
    })
}

fn pair_model(a: &Agent, b: &Agent, n: usize, ra: &Rows, rb: &Rows, whole: u64, q: u64) -> Result<Model, SearchError> {
    let rel = |rows: &Rows| {
        Relation::from_rows(
            FrameKind::MonadicDerivative,
            rows.iter().map(|&m| PointSet::from_mask(n, m)).collect(),
        )
        .map_err(|e| SearchError::WitnessRejected(e.to_string()))
    };
    Model::from_indexed(
        n,
        vec![(a.clone(), rel(ra)?), (b.clone(), rel(rb)?)],
        vec![
            ("whole".to_string(), PointSet::from_mask(n, whole)),
            ("q".to_string(), PointSet::from_mask(n, q)),
        ],
    )
    .map_err(|e| SearchError::WitnessRejected(e.to_string()))
}

/// The pair-model pipeline: both relations unions of 2-clusters, `whole`
/// alternating across every cluster of either agent, then every `q`.
///
/// Restricting a model of the formula to the truth set of `C{a,b} Two`
/// leaves an open submodel that validates `Two`, in which every cluster
/// is split by `whole`; so these are the only pair models to consider.
fn pair_pipeline(
    psi: &Formula,
    a: &Agent,
    b: &Agent,
    max_size: usize,
    deadline: Option<Instant>,
) -> Result<(Report, Option<(Model, usize)>), SearchError> {
    if max_size > SEARCH_LIMIT {
        return Err(SearchError::TooLarge(max_size));
    }
    let compiled = CompiledFormula::compile(psi, &[a.clone(), b.clone()], &["whole".to_string(), "q".to_string()])?;
    let mut results = Vec::new();
    let mut counterexample = None;
    let mut scratch = Vec::new();
    'sizes: for n in (2..=max_size).step_by(2) {
        let start = Instant::now();
        let matchings = frames(n, FrameKind::MonadicDerivative, false).expect("pairs");
        let sym = n <= SYMMETRY_LIMIT;
        let perms = if sym { permutations(n) } else { Vec::new() };
        let mut checked = 0u64;
        let mut verdict = "UNSAT";
        let full = (1u64 << n) - 1;
        'frames: for ra in matchings.iter().filter(|r| !sym || is_minimal(r, &perms)) {
            let stab = if sym { stabilizer(ra, &perms) } else { Vec::new() };
            for rb in matchings.iter().filter(|r| !sym || is_minimal(r, &stab)) {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    verdict = "TIMEOUT";
                    break 'frames;
                }
                let mut mm = MaskModel {
                    n,
                    rows: vec![ra.clone(), rb.clone()],
                    val: vec![0, 0],
                };
                for whole in (0..=full).filter(|&w| bichromatic(w, ra) && bichromatic(w, rb)) {
                    mm.val[0] = whole;
                    for q in 0..=full {
                        mm.val[1] = q;
                        checked += 1;
                        let truth = compiled.eval(&mm, &mut scratch);
                        if truth != 0 {
                            let point = truth.trailing_zeros() as usize;
                            let model = pair_model(a, b, n, ra, rb, whole, q)?;
                            if !holds_at(&model, point, psi)? {
                                return Err(SearchError::WitnessRejected(format!(
                                    "compiled and reference evaluation disagree at point {point}"
                                )));
                            }
                            verdict = "SAT";
                            counterexample = Some((model, point));
                            break 'frames;
                        }
                    }
                }
            }
        }
        results.push(ResultRow {
            n,
            verdict: verdict.to_string(),
            models_checked: checked,
            ms: start.elapsed().as_millis() as u64,
        });
        if verdict != "UNSAT" {
            break 'sizes;
        }
    }
    let report = Report {
        formula: psi.to_string(),
        class: "monadic-derivative pairs validating Two".to_string(),
        results,
    };
    Ok((report, counterexample))
}

/// Runs the bounded non-finite-model-property experiment for
/// `(F q & ~P q)^top & C{a,b} Two`:
///
/// 1. the pair-model pipeline on even carriers up to `max_size`;
/// 2. plain enumeration of all pair bimodels, without the `whole` filter,
///    up to `cross_check_max_size`, which guards the filter;
/// 3. every weakly transitive bimodel up to `wk4_max_size`;
///
/// together with the integer model where the PLTL formula holds.
pub fn nofmp_experiment(config: &NofmpConfig) -> Result<NofmpReport, SearchError> {
    let a: Agent = "a".parse().expect("valid name");
    let b: Agent = "b".parse().expect("valid name");
    let psi = nofmp_formula(&a, &b);
    let deadline = config.budget.map(|d| Instant::now() + d);
    let remaining = || deadline.map(|d| d.saturating_duration_since(Instant::now()));

    let (pairs, mut counterexample) = pair_pipeline(&psi, &a, &b, config.max_size, deadline)?;
    let mut reports = vec![pairs];

    let mut generic = |kind: FrameKind, max: usize, class: &str| -> Result<(), SearchError> {
        if max == 0 {
            return Ok(());
        }
        let mut spec = SearchSpec::uniform(psi.clone(), &[a.clone(), b.clone()], kind, max);
        spec.budget = remaining();
        spec.jobs = config.jobs;
        let out = sat_search(&spec)?;
        if let super::Verdict::Sat { model, point } = &out.verdict {
            counterexample.get_or_insert((model.clone(), *point));
        }
        reports.push(out.report(&psi, class));
        Ok(())
    };
    generic(
        FrameKind::MonadicDerivative,
        config.cross_check_max_size.min(config.max_size),
        "monadic-derivative pairs, unfiltered",
    )?;
    generic(FrameKind::WK4, config.wk4_max_size.min(config.max_size), "wk4")?;

    Ok(NofmpReport {
        reports,
        infinite_witness: infinite_witness(),
        counterexample,
    })
}
