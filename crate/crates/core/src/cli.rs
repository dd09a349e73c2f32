//! The `tpdl` command line. Exit codes: 0 on success, 1 when a verified
//! property fails, 2 on usage or input errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::pltl::{eval_pltl_finite, eval_pltl_tail, BijectiveModel, TailModel};
use crate::search::{nofmp_experiment, sat_search, NofmpConfig, SearchSpec, Verdict};
use crate::semantics::truth_set;
use crate::spaces::{FrameKind, Model};
use crate::syntax::{parse_formula, parse_formula_inferring, parse_pltl, plus_translation, star_translation, top_translation, Agent};
use crate::verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "tpdl", version, about = "Polytopological PDL over finite derivative spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula on a model file.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Point name (or index) to report on.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Apply a syntactic translation.
    Translate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        formula: String,
        /// Agents; for `top`, exactly two (default a,b).
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
    },
    /// Bounded finite-model search.
    Sat {
        /// A frame kind for every agent, or `agent:kind` pairs.
        #[arg(long)]
        class: String,
        #[arg(long, value_delimiter = ',')]
        agents: Vec<String>,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 1)]
        min_size: usize,
        /// Seconds.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        allow_singletons: bool,
        #[arg(long)]
        no_symmetry: bool,
        #[arg(long)]
        json: bool,
    },
    /// The bounded search for a finite model of the non-FMP witness.
    Nofmp {
        #[arg(long)]
        max_size: usize,
        /// Seconds.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 4)]
        wk4_max_size: usize,
        #[arg(long, default_value_t = 4)]
        cross_check_max_size: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Randomised verification suites.
    Verify {
        #[arg(long)]
        suite: SuiteArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        iterations: usize,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a PLTL formula on a bijective or integer model file.
    Pltl {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Read an integer model with eventually periodic valuations.
        #[arg(long)]
        tail: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Star,
    Plus,
    Top,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Axioms,
    Theorem1,
    Theorem2,
    Lemmas,
    Restriction,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Axioms => Suite::Axioms,
            SuiteArg::Theorem1 => Suite::Theorem1,
            SuiteArg::Theorem2 => Suite::Theorem2,
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::Restriction => Suite::Restriction,
            SuiteArg::All => Suite::All,
        }
    }
}

/// An input problem; reported on stderr with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage(e: impl std::fmt::Display) -> Usage {
    Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))
}

fn budget(secs: Option<f64>) -> Result<Option<Duration>, Usage> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|_| Usage(format!("invalid budget `{s}`"))))
        .transpose()
}

fn agents(names: &[String]) -> Result<Vec<Agent>, Usage> {
    names.iter().map(|n| n.trim().parse::<Agent>().map_err(usage)).collect()
}

/// Runs the command line on the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the command line, writing results to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Usage> {
    let io = |e: std::io::Error| Usage(format!("write failed: {e}"));
    match command {
        Command::Check {
            model,
            formula,
            point,
            json,
        } => {
            let m = Model::from_json(&read(&model)?).map_err(usage)?;
            let declared: BTreeSet<Agent> = m.agents().iter().cloned().collect();
            let f = parse_formula(&formula, &declared).map_err(usage)?;
            let truth = truth_set(&m, &f).map_err(usage)?.truth_set;
            let at = point
                .map(|p| {
                    m.point_index(&p)
                        .or_else(|| p.parse::<usize>().ok().filter(|&i| i < m.size()))
                        .ok_or_else(|| Usage(format!("unknown point `{p}`")))
                })
                .transpose()?;
            let names = m.names_of(&truth);
            if json {
                let mut v = json!({ "formula": f.to_string(), "truth_set": names });
                if let Some(x) = at {
                    v["point"] = json!(m.point_name(x));
                    v["holds"] = json!(truth.contains(x));
                }
                writeln!(out, "{v}").map_err(io)?;
            } else {
                writeln!(out, "[[{f}]] = {{{}}}", names.join(", ")).map_err(io)?;
                if let Some(x) = at {
                    writeln!(out, "{} at {}", truth.contains(x), m.point_name(x)).map_err(io)?;
                }
            }
            Ok(0)
        }
        Command::Translate { mode, formula, agents: names } => {
            let text = match mode {
                Mode::Star | Mode::Plus => {
                    let f = match &names {
                        Some(n) => parse_formula(&formula, &agents(n)?.into_iter().collect()),
                        None => parse_formula_inferring(&formula),
                    }
                    .map_err(usage)?;
                    match mode {
                        Mode::Star => star_translation(&f),
                        _ => plus_translation(&f),
                    }
                    .to_string()
                }
                Mode::Top => {
                    let ab = agents(&names.unwrap_or_else(|| vec!["a".into(), "b".into()]))?;
                    let [a, b] = ab.as_slice() else {
                        return Err(Usage("--mode top needs exactly two agents".into()));
                    };
                    let f = parse_pltl(&formula).map_err(usage)?;
                    top_translation(&f, a, b).map_err(usage)?.to_string()
                }
            };
            writeln!(out, "{text}").map_err(io)?;
            Ok(0)
        }
        Command::Sat {
            class,
            agents: names,
            max_size,
            formula,
            min_size,
            budget: secs,
            jobs,
            allow_singletons,
            no_symmetry,
            json,
        } => {
            let ags = agents(&names)?;
            let kinds = class_kinds(&class, &ags)?;
            let f = parse_formula(&formula, &ags.iter().cloned().collect()).map_err(usage)?;
            let mut spec = SearchSpec::new(f.clone(), kinds, max_size);
            spec.min_size = min_size;
            spec.budget = budget(secs)?;
            spec.jobs = jobs.max(1);
            spec.allow_singletons = allow_singletons;
            spec.symmetry = !no_symmetry;
            let class_name = spec.class_name();
            let outcome = sat_search(&spec).map_err(usage)?;
            let report = outcome.report(&f, &class_name);
            let witness = match &outcome.verdict {
                Verdict::Sat { model, point } => Some((model, *point)),
                _ => None,
            };
            if json {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                if let Some((m, x)) = witness {
                    let model: serde_json::Value = serde_json::from_str(&m.to_json()).expect("model json");
                    v["witness"] = json!({ "point": m.point_name(x), "model": model });
                }
                writeln!(out, "{v}").map_err(io)?;
            } else {
                write!(out, "{report}").map_err(io)?;
                writeln!(out, "verdict: {}", outcome.verdict.label()).map_err(io)?;
                if let Some((m, x)) = witness {
                    writeln!(out, "witness at {}:\n{}", m.point_name(x), m.to_json()).map_err(io)?;
                }
            }
            Ok(0)
        }
        Command::Nofmp {
            max_size,
            budget: secs,
            wk4_max_size,
            cross_check_max_size,
            jobs,
            json,
        } => {
            if max_size % 2 != 0 || max_size == 0 {
                return Err(Usage(format!("--max-size must be a positive even number, not {max_size}")));
            }
            let config = NofmpConfig {
                max_size,
                wk4_max_size,
                cross_check_max_size,
                budget: budget(secs)?,
                jobs: jobs.max(1),
            };
            let report = nofmp_experiment(&config).map_err(usage)?;
            if json {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["reproduces_theorem"] = json!(report.reproduces_theorem());
                writeln!(out, "{v}").map_err(io)?;
            } else {
                write!(out, "{report}").map_err(io)?;
            }
            Ok(if report.counterexample.is_some() { 1 } else { 0 })
        }
        Command::Verify {
            suite,
            seed,
            iterations,
            json,
        } => {
            let reports = run_suite(suite.into(), seed, iterations);
            if json {
                writeln!(out, "{}", serde_json::to_string(&reports).expect("reports serialize")).map_err(io)?;
            } else {
                for r in &reports {
                    writeln!(out, "{r}").map_err(io)?;
                }
            }
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::Pltl {
            model,
            formula,
            tail,
            json,
        } => {
            let text = read(&model)?;
            let f = parse_pltl(&formula).map_err(usage)?;
            if tail {
                let m = TailModel::from_json(&text).map_err(usage)?;
                let truth = eval_pltl_tail(&m, &f).map_err(usage)?;
                if json {
                    let set = serde_json::to_value(&truth).expect("tail set serializes");
                    writeln!(out, "{}", json!({ "formula": f.to_string(), "truth_set": set, "text": truth.to_string() }))
                        .map_err(io)?;
                } else {
                    writeln!(out, "[[{f}]] = {truth}").map_err(io)?;
                }
            } else {
                let m = BijectiveModel::from_json(&text).map_err(usage)?;
                let truth = eval_pltl_finite(&m, &f).map_err(usage)?;
                let points: Vec<usize> = truth.iter().collect();
                if json {
                    writeln!(out, "{}", json!({ "formula": f.to_string(), "truth_set": points })).map_err(io)?;
                } else {
                    let list: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                    writeln!(out, "[[{f}]] = {{{}}}", list.join(", ")).map_err(io)?;
                }
            }
            Ok(0)
        }
    }
}

/// `wk4` for every agent, or `a:wk4,b:s4`.
fn class_kinds(class: &str, agents: &[Agent]) -> Result<Vec<(Agent, FrameKind)>, Usage> {
    if !class.contains(':') {
        let kind: FrameKind = class.parse().map_err(usage)?;
        return Ok(agents.iter().map(|a| (a.clone(), kind)).collect());
    }
    let mut kinds = Vec::new();
    for part in class.split(',') {
        let (a, k) = part
            .split_once(':')
            .ok_or_else(|| Usage(format!("expected agent:kind, found `{part}`")))?;
        let a: Agent = a.trim().parse().map_err(usage)?;
        if !agents.contains(&a) {
            return Err(Usage(format!("class names agent `{a}` missing from --agents")));
        }
        kinds.push((a, k.trim().parse().map_err(usage)?));
    }
    if let Some(a) = agents.iter().find(|a| !kinds.iter().any(|(b, _)| b == *a)) {
        return Err(Usage(format!("no frame kind given for agent `{a}`")));
    }
    Ok(kinds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("tpdl").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn translate_star() {
        let (code, out, _) = call(&["translate", "--mode", "star", "--formula", "<(a u b)*>q"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "<(a* u b*)*>q");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["translate", "--mode", "cube", "--formula", "q"]).0, 2);
        assert_eq!(call(&["sat", "--class", "wk4"]).0, 2);
        assert_eq!(call(&["nofmp", "--max-size", "5"]).0, 2);
        assert_eq!(call(&["check", "--model", "/nonexistent", "--formula", "true"]).0, 2);
        assert_eq!(call(&["bogus"]).0, 2);
    }

    #[test]
    fn sat_finds_the_two_cluster() {
        let (code, out, _) = call(&[
            "sat", "--class", "monadic-derivative", "--agents", "a", "--max-size", "2", "--formula", "<a>p",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict: SAT"), "{out}");
    }

    #[test]
    fn per_agent_classes() {
        let ags = agents(&["a".into(), "b".into()]).unwrap();
        let k = class_kinds("a:wk4,b:s4", &ags).unwrap();
        assert_eq!(k[1].1, FrameKind::S4);
        assert!(class_kinds("a:wk4", &ags).is_err());
        assert!(class_kinds("cube", &ags).is_err());
    }
}
