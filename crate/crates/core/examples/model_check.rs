//! Building a model and evaluating formulas on it.
//!
//! cargo run --example model_check [model.json] [formula]

use tpdl::semantics::{common_knowledge_open_check, holds_at, truth_set};
use tpdl::spaces::{FrameKind, Model};
use tpdl::syntax::{parse_formula, Agent};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let model = match args.first() {
        Some(path) => Model::from_json(&std::fs::read_to_string(path).expect("readable file")).expect("valid model"),
        None => Model::builder(["x", "y", "z", "w"])
            .relation("a", FrameKind::IrreflexiveWK4, &[("x", "y"), ("y", "x"), ("x", "z"), ("y", "z")])
            .relation("b", FrameKind::S4, &[("x", "x"), ("y", "y"), ("z", "z"), ("w", "w"), ("z", "w")])
            .atom("p", &["z"])
            .atom("q", &["x", "w"])
            .build()
            .expect("valid model"),
    };
    let agents = model.agents().iter().cloned().collect();
    let formulas = match args.get(1) {
        Some(f) => vec![f.clone()],
        None => vec![
            "<a>p".to_string(),
            "<a>q".to_string(),
            "<b>q".to_string(),
            "[a]p".to_string(),
            "<(a;b)*>q".to_string(),
            "[(a u b)*](p | q | <a>true)".to_string(),
        ],
    };
    println!("points: {:?}", model.points());
    for text in formulas {
        let f = parse_formula(&text, &agents).expect("well formed");
        let truth = truth_set(&model, &f).expect("signature matches").truth_set;
        println!("[[{f}]] = {:?}", model.names_of(&truth));
    }

    let f = parse_formula("p | <a>p", &agents).unwrap();
    println!("\n{f} holds at x: {}", holds_at(&model, 0, &f).unwrap());

    // derivative of a set: the points that see it
    let a: Agent = "a".parse().unwrap();
    let p = model.valuation("p").unwrap();
    println!("d_a(p) = {:?}", model.names_of(&model.derivative(&a, p).unwrap()));
    println!("c_a(p) = {:?}", model.names_of(&model.closure(&a, p).unwrap()));

    let all: Vec<Agent> = model.agents().to_vec();
    let g = parse_formula("p | <a>p | <b>q", &agents).unwrap();
    let report = common_knowledge_open_check(&model, &all, &g).unwrap();
    println!("common knowledge of {g}: {:?}", model.names_of(&report.truth_set));
    for (agent, open) in &report.open_for {
        println!("  open for {agent}: {open}");
    }
}
