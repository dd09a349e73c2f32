//! PLTL on finite bijective models and on the integers, and the doubling
//! that turns a bijective model into a pair of monadic derivative spaces.
//!
//! cargo run --example pltl_doubling

use tpdl::pltl::{doubling, eval_pltl_finite, eval_pltl_tail, BijectiveModel, TailModel, TailSet};
use tpdl::semantics::{extract_successor, holds_at, validates_two};
use tpdl::syntax::{parse_pltl, top_translation, Agent};

fn main() {
    let phi = parse_pltl("F q & ~P q").unwrap();

    let z = TailModel::new([("q", TailSet::finite([1]))]);
    println!("on Z with q = {{1}}: [[{phi}]] = {}", eval_pltl_tail(&z, &phi).unwrap());
    let tail = TailModel::new([("q", TailSet::from(3))]);
    for text in ["X q", "Y q", "P q", "F ~q", "~q & X q"] {
        let f = parse_pltl(text).unwrap();
        println!("on Z with q = [3, inf): [[{f}]] = {}", eval_pltl_tail(&tail, &f).unwrap());
    }

    let cycle = BijectiveModel::cycle(3, [("q", vec![1])]).unwrap();
    println!("\n3-cycle, q = {{1}}: [[{phi}]] = {:?}", eval_pltl_finite(&cycle, &phi).unwrap().iter().collect::<Vec<_>>());

    let (a, b): (Agent, Agent) = ("a".parse().unwrap(), "b".parse().unwrap());
    let d = doubling(&cycle, &a, &b, "whole").unwrap();
    println!("\ndoubled: {:?}", d.model.points());
    println!("validates Two: {}", validates_two(&d.model, &a, &b, "whole").unwrap());
    let sa = extract_successor(&d.model, &a).unwrap().unwrap();
    let sb = extract_successor(&d.model, &b).unwrap().unwrap();
    for i in 0..cycle.size() {
        let j = sb[sa[d.embedding[i]]];
        println!("S_b S_a({}) = {}", d.model.point_name(d.embedding[i]), d.model.point_name(j));
    }

    let f = parse_pltl("X q | Y q").unwrap();
    let top = top_translation(&f, &a, &b).unwrap();
    let pltl = eval_pltl_finite(&cycle, &f).unwrap();
    for i in 0..cycle.size() {
        println!("{f} at {i}: {}, {top} at x{i}: {}", pltl.contains(i), holds_at(&d.model, d.embedding[i], &top).unwrap());
    }
}
