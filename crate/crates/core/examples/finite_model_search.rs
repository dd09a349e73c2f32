//! Bounded finite-model search over frame classes and over bijective models.
//!
//! cargo run --release --example finite_model_search

use tpdl::search::{pltl_finite_search, sat_search, SearchSpec, Verdict};
use tpdl::spaces::FrameKind;
use tpdl::syntax::{parse_formula_inferring, parse_pltl, Agent};

fn main() {
    let a: Agent = "a".parse().unwrap();
    let b: Agent = "b".parse().unwrap();
    let cases = [
        ("<a>p", FrameKind::MonadicDerivative, 4),
        ("<a>p & [a]~p", FrameKind::WK4, 3),
        ("<a>true & [a]false", FrameKind::S4, 3),
        ("<a><a>p & ~<a>p", FrameKind::WK4, 3),
        ("<a><a>p & ~<a>p", FrameKind::K4, 3),
        ("<a>p & <b>~p & [(a u b)*](p -> [b]p)", FrameKind::Equivalence, 4),
    ];
    for (text, kind, n) in cases {
        let f = parse_formula_inferring(text).unwrap();
        let agents: Vec<Agent> = [&a, &b].into_iter().filter(|g| f.agents().contains(*g)).cloned().collect();
        let spec = SearchSpec::uniform(f.clone(), &agents, kind, n);
        let out = sat_search(&spec).unwrap();
        print!("{}", out.report(&f, &spec.class_name()));
        if let Verdict::Sat { model, point } = &out.verdict {
            println!("-> model on {:?}, true at {}", model.points(), model.point_name(*point));
        }
        println!();
    }

    for text in ["F q & ~P q", "X q & ~q & X X q", "q & Y ~q & F ~q"] {
        let f = parse_pltl(text).unwrap();
        let out = pltl_finite_search(&f, 6, None).unwrap();
        match &out.verdict {
            Verdict::Sat { model, point } => {
                println!("{f}: SAT at {point} of succ {:?}, q = {:?}", model.succ(), model.valuation("q").unwrap().iter().collect::<Vec<_>>())
            }
            v => println!("{f}: {} ({} models)", v.label(), out.models_checked()),
        }
    }
}
