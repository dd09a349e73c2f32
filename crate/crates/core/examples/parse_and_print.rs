//! Parsing, printing and the syntactic translations.
//!
//! cargo run --example parse_and_print

use tpdl::syntax::{
    modal_depth, parse_formula, parse_formula_inferring, parse_pltl, plus_translation, star_translation,
    top_translation, Agent, Formula,
};

fn main() {
    let f = parse_formula_inferring("<(a u b)*>q").expect("well formed");
    println!("parsed:     {f}");
    println!("star:       {}", star_translation(&f));
    println!("plus:       {}", plus_translation(&f));

    // precedence: ~ binds tighter than &, & tighter than |, -> is right associative
    let g = parse_formula_inferring("~p & [a;b*]q | r -> p -> q").unwrap();
    println!("\nprinted back: {g}");
    println!("size {}, modal depth {}", g.size(), modal_depth(&g));
    assert_eq!(parse_formula_inferring(&g.to_string()).unwrap(), g);

    // with declared agents, an agent name in atom position is rejected
    let agents = ["a", "b"].iter().map(|s| s.parse::<Agent>().unwrap()).collect();
    match parse_formula("<a>b", &agents) {
        Ok(h) => println!("unexpected: {h}"),
        Err(e) => println!("\n<a>b with agents a, b: {e}"),
    }

    let a: Agent = "a".parse().unwrap();
    let b: Agent = "b".parse().unwrap();
    let ck = Formula::common_knowledge([a.clone(), b.clone()], Formula::prop("p")).unwrap();
    println!("\ncommon knowledge of p: {ck}");

    let phi = parse_pltl("F q & ~P q").unwrap();
    println!("\nPLTL {phi}  =>  {}", top_translation(&phi, &a, &b).unwrap());
    let psi = parse_pltl("X Y q -> q").unwrap();
    println!("PLTL {psi}  =>  {}", top_translation(&psi, &a, &b).unwrap());
}
