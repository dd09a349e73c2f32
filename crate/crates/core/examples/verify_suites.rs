//! Runs every randomised verification suite.
//!
//! cargo run --release --example verify_suites -- [seed] [iterations]

use tpdl::verify::{run_suite, Suite};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(0, |s| s.parse().expect("a seed"));
    let iterations = args.next().map_or(100, |s| s.parse().expect("a count"));
    let reports = run_suite(Suite::All, seed, iterations);
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().any(|r| !r.passed()) {
        std::process::exit(1);
    }
}
