//! Closures, irreflexive resolution, restriction to open sets and bounded
//! unwinding, each checked against the original model.
//!
//! cargo run --example model_transformations

use tpdl::semantics::{holds_at, truth_set};
use tpdl::spaces::{
    bounded_unwinding, irreflexive_resolution, reflexive_transitive_closure, restrict_to_open, transitive_closure,
    FrameKind, Model,
};
use tpdl::syntax::{parse_formula_inferring, plus_translation, star_translation, Agent};

fn main() {
    let m = Model::builder(["x", "y", "z"])
        .relation("a", FrameKind::WK4, &[("x", "y"), ("y", "z"), ("x", "z"), ("z", "z")])
        .atom("p", &["z"])
        .build()
        .unwrap();

    let f = parse_formula_inferring("<a>(p & [a]p)").unwrap();
    let star = reflexive_transitive_closure(&m);
    let plus = transitive_closure(&m);
    for w in 0..m.size() {
        let lhs = holds_at(&m, w, &star_translation(&f)).unwrap();
        let rhs = holds_at(&star, w, &f).unwrap();
        let lhs_plus = holds_at(&m, w, &plus_translation(&f)).unwrap();
        let rhs_plus = holds_at(&plus, w, &f).unwrap();
        println!("{}: star {lhs}={rhs}, plus {lhs_plus}={rhs_plus}", m.point_name(w));
    }

    let (resolved, witness) = irreflexive_resolution(&m).unwrap();
    println!("\nresolution: {:?}", resolved.points());
    witness.verify().expect("surjective p-morphism");
    for x in 0..resolved.size() {
        assert_eq!(holds_at(&resolved, x, &f).unwrap(), holds_at(&m, witness.map[x], &f).unwrap());
    }
    println!("truth of {f} agrees along the projection");

    let a: Agent = "a".parse().unwrap();
    let up = m.set_of(&["y", "z"]).unwrap();
    let sub = restrict_to_open(&m, &up, &[a.clone()]).unwrap();
    println!("\nrestricted to {:?}: [[{f}]] = {:?}", sub.points(), sub.names_of(&truth_set(&sub, &f).unwrap().truth_set));
    println!("{{x}} open? {:?}", restrict_to_open(&m, &m.set_of(&["x"]).unwrap(), &[a]).err());

    let k4 = transitive_closure(&m);
    let u = bounded_unwinding(&k4, 0, 3).unwrap();
    println!("\nunwinding from x, sequences up to length 3: {:?}", u.model.points());
    let g = parse_formula_inferring("<a><a>p").unwrap();
    println!("{g} at root: {} (original: {})", holds_at(&u.model, 0, &g).unwrap(), holds_at(&k4, 0, &g).unwrap());
}
