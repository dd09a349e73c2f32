//! The bounded search for a finite model of the formula that has only
//! infinite models. Pass the largest even carrier and the largest carrier
//! for the search over all weakly transitive bimodels.
//!
//! cargo run --release --example nofmp -- 6 3

use tpdl::search::{nofmp_experiment, NofmpConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().expect("a number")).collect();
    let config = NofmpConfig {
        max_size: args.first().copied().unwrap_or(6),
        wk4_max_size: args.get(1).copied().unwrap_or(3),
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..NofmpConfig::default()
    };
    let report = nofmp_experiment(&config).expect("valid configuration");
    print!("{report}");
    println!("reproduces the theorem: {}", report.reproduces_theorem());
}
