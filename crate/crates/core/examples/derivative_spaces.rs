//! Frames, derivative operators and the derivative-space axioms.
//!
//! cargo run --example derivative_spaces

use tpdl::spaces::{check_derivative_axioms, validate_frame, FrameKind, PointSet, Relation};

fn show(s: &PointSet) -> String {
    format!("{:?}", s.iter().collect::<Vec<_>>())
}

fn main() {
    // a weakly transitive frame: a 2-cluster {0, 1} above the point 2
    let edges = [(0, 1), (1, 0), (0, 2), (1, 2)];
    let rel = Relation::new(3, FrameKind::IrreflexiveWK4, &edges).expect("irreflexive and weakly transitive");
    let a = PointSet::from_indices(3, [0]);
    println!("d({{0}}) = {}", show(&rel.derivative(&a)));
    println!("d(d({{0}})) = {}", show(&rel.derivative(&rel.derivative(&a))));
    println!("c({{0}}) = {}", show(&rel.closure(&a)));
    println!("atomic opens: {:?}", rel.atomic_opens().iter().map(show).collect::<Vec<_>>());
    println!("axioms: {:?}", rel.check_derivative_axioms());

    for kind in FrameKind::ALL {
        println!("{kind:>20}: {:?}", validate_frame(3, &edges, kind).map_err(|v| v.to_string()));
    }

    // dropping (0, 2) breaks weak transitivity and weak idempotence with it
    let broken = [(0, 1), (1, 2)];
    println!("\nedges {broken:?}");
    println!("  wk4: {:?}", validate_frame(3, &broken, FrameKind::WK4).map_err(|v| v.to_string()));
    println!("  axioms: {:?}", check_derivative_axioms(3, &broken));

    // on a preorder the closure operator is a Kuratowski closure
    let s4 = Relation::new(3, FrameKind::S4, &[(0, 0), (1, 1), (2, 2), (0, 1)]).unwrap();
    for set in PointSet::all_subsets(3) {
        let c = s4.closure(&set);
        assert!(set.is_subset(&c) && s4.closure(&c) == c);
    }
    println!("\nS4 closure is increasing and idempotent on all 8 subsets");
}
