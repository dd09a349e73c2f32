//! Seeded random instances: frames of every kind, models, formulas and
//! bijective models. Everything is driven by a caller-supplied RNG, so runs
//! are reproducible from a seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pltl::BijectiveModel;
use crate::spaces::{FrameKind, Model, PointSet, Relation};
use crate::syntax::{Agent, Formula, PltlFormula, Program};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(rows: &mut [PointSet]) {
    for k in 0..rows.len() {
        let via = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&via);
            }
        }
    }
}

/// Each point gets about `avg_out` random successors.
pub fn random_rows<R: Rng>(rng: &mut R, n: usize, avg_out: f64) -> Vec<PointSet> {
    let p = if n == 0 { 0.0 } else { (avg_out / n as f64).clamp(0.0, 1.0) };
    (0..n)
        .map(|_| PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(p))))
        .collect()
}

fn random_blocks<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let blocks = rng.gen_range(1..=n.max(1));
    (0..n).map(|_| rng.gen_range(0..blocks)).collect()
}

/// A random relation of the given kind.
///
/// Weakly transitive relations are exactly transitive relations with some
/// loops removed, so closing a random relation and dropping a random subset
/// of loops reaches every WK4 frame.
pub fn random_relation<R: Rng>(rng: &mut R, n: usize, kind: FrameKind) -> Relation {
    let rows = match kind {
        FrameKind::Equivalence | FrameKind::MonadicDerivative => {
            let block = random_blocks(rng, n);
            let reflexive = kind == FrameKind::Equivalence;
            (0..n)
                .map(|x| PointSet::from_indices(n, (0..n).filter(|&y| block[x] == block[y] && (reflexive || x != y))))
                .collect()
        }
        _ => {
            let avg = rng.gen_range(0.3..2.0);
            let mut rows = random_rows(rng, n, avg);
            close(&mut rows);
            for (x, row) in rows.iter_mut().enumerate() {
                match kind {
                    FrameKind::S4 => row.insert(x),
                    FrameKind::IrreflexiveWK4 => row.remove(x),
                    FrameKind::WK4 if rng.gen_bool(0.5) => row.remove(x),
                    _ => {}
                }
            }
            rows
        }
    };
    Relation::from_rows(kind, rows).expect("generated relation has its kind")
}

/// A random valuation of each atom, each point in with probability 1/2.
pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> PointSet {
    PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

pub fn random_model<R: Rng>(rng: &mut R, n: usize, kinds: &[(Agent, FrameKind)], atoms: &[String]) -> Model {
    let relations = kinds
        .iter()
        .map(|(a, k)| (a.clone(), random_relation(rng, n, *k)))
        .collect();
    let valuation = atoms.iter().map(|p| (p.clone(), random_set(rng, n))).collect();
    Model::from_indexed(n, relations, valuation).expect("generated model is well formed")
}

/// Agents `a`, `b` and atoms `p`, `q`, `r`.
pub fn default_signature() -> (Vec<Agent>, Vec<String>) {
    let agents = ["a", "b"].iter().map(|s| s.parse().expect("valid name")).collect();
    let atoms = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
    (agents, atoms)
}

pub fn random_program<R: Rng>(rng: &mut R, agents: &[Agent], size: usize, star: bool) -> Program {
    if size <= 1 {
        return Program::Atom(agents.choose(rng).expect("at least one agent").clone());
    }
    match rng.gen_range(0..if star { 5 } else { 4 }) {
        0 | 1 => {
            let l = rng.gen_range(1..size);
            Program::seq(random_program(rng, agents, l, star), random_program(rng, agents, size - l, star))
        }
        2 | 3 => {
            let l = rng.gen_range(1..size);
            Program::union(random_program(rng, agents, l, star), random_program(rng, agents, size - l, star))
        }
        _ => Program::star(random_program(rng, agents, size - 1, star)),
    }
}

fn leaf<R: Rng>(rng: &mut R, atoms: &[String]) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::prop(atoms.choose(rng).expect("at least one atom")),
    }
}

/// A random formula with roughly `size` symbols. With `star` off the
/// result is star-free.
pub fn random_formula<R: Rng>(rng: &mut R, agents: &[Agent], atoms: &[String], size: usize, star: bool) -> Formula {
    if size <= 1 {
        return leaf(rng, atoms);
    }
    match rng.gen_range(0..7) {
        0 => Formula::not(random_formula(rng, agents, atoms, size - 1, star)),
        1..=3 if size >= 3 => {
            let l = rng.gen_range(1..size - 1);
            let (x, y) = (
                random_formula(rng, agents, atoms, l, star),
                random_formula(rng, agents, atoms, size - 1 - l, star),
            );
            match rng.gen_range(0..3) {
                0 => Formula::and(x, y),
                1 => Formula::or(x, y),
                _ => Formula::implies(x, y),
            }
        }
        k => {
            let psize = rng.gen_range(1..=(size - 1).clamp(1, 4));
            let p = random_program(rng, agents, psize, star);
            let body = random_formula(rng, agents, atoms, (size - 1).saturating_sub(psize).max(1), star);
            if k % 2 == 0 {
                Formula::diamond(p, body)
            } else {
                Formula::boxed(p, body)
            }
        }
    }
}

/// Existential positive formulas of modal depth at most `depth`: literals,
/// `&`, `|` and `<..>` over one agent or a union of agents.
pub fn random_positive_formula<R: Rng>(rng: &mut R, agents: &[Agent], atoms: &[String], depth: usize) -> Formula {
    let literal = |rng: &mut R| {
        let p = Formula::prop(atoms.choose(rng).expect("at least one atom"));
        if rng.gen_bool(0.3) {
            Formula::not(p)
        } else {
            p
        }
    };
    match rng.gen_range(0..6) {
        0 | 1 => literal(rng),
        2 => Formula::and(
            random_positive_formula(rng, agents, atoms, depth),
            random_positive_formula(rng, agents, atoms, depth),
        ),
        3 => Formula::or(
            random_positive_formula(rng, agents, atoms, depth),
            random_positive_formula(rng, agents, atoms, depth),
        ),
        _ if depth == 0 => literal(rng),
        _ => {
            let chosen: Vec<Agent> = agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            let p = Program::union_of(chosen).unwrap_or_else(|| Program::Atom(agents[0].clone()));
            Formula::diamond(p, random_positive_formula(rng, agents, atoms, depth - 1))
        }
    }
}

pub fn random_pltl<R: Rng>(rng: &mut R, atoms: &[String], size: usize) -> PltlFormula {
    if size <= 1 {
        return match rng.gen_range(0..10) {
            0 => PltlFormula::True,
            1 => PltlFormula::False,
            _ => PltlFormula::prop(atoms.choose(rng).expect("at least one atom")),
        };
    }
    let k = rng.gen_range(0..8);
    if k < 3 && size >= 3 {
        let l = rng.gen_range(1..size - 1);
        let (x, y) = (random_pltl(rng, atoms, l), random_pltl(rng, atoms, size - 1 - l));
        return match k {
            0 => PltlFormula::and(x, y),
            1 => PltlFormula::or(x, y),
            _ => PltlFormula::implies(x, y),
        };
    }
    let g = random_pltl(rng, atoms, size - 1);
    match k % 5 {
        0 => PltlFormula::not(g),
        1 => PltlFormula::next(g),
        2 => PltlFormula::yesterday(g),
        3 => PltlFormula::future(g),
        _ => PltlFormula::past(g),
    }
}

/// Every PLTL formula over `atoms` with exactly `size` symbols, counting
/// `true`, `false`, atoms, the unary and the binary connectives.
pub fn pltl_formulas_of_size(atoms: &[String], size: usize) -> Vec<PltlFormula> {
    let mut table: Vec<Vec<PltlFormula>> = vec![Vec::new()];
    for s in 1..=size {
        let mut out = Vec::new();
        if s == 1 {
            out.push(PltlFormula::True);
            out.push(PltlFormula::False);
            out.extend(atoms.iter().map(|a| PltlFormula::prop(a)));
        } else {
            for g in &table[s - 1] {
                out.push(PltlFormula::not(g.clone()));
                out.push(PltlFormula::next(g.clone()));
                out.push(PltlFormula::yesterday(g.clone()));
                out.push(PltlFormula::future(g.clone()));
                out.push(PltlFormula::past(g.clone()));
            }
            for l in 1..s - 1 {
                for x in &table[l] {
                    for y in &table[s - 1 - l] {
                        out.push(PltlFormula::and(x.clone(), y.clone()));
                        out.push(PltlFormula::or(x.clone(), y.clone()));
                        out.push(PltlFormula::implies(x.clone(), y.clone()));
                    }
                }
            }
        }
        table.push(out);
    }
    table.pop().unwrap_or_default()
}

/// A uniformly random permutation with random valuations.
pub fn random_bijective_model<R: Rng>(rng: &mut R, n: usize, atoms: &[String]) -> BijectiveModel {
    let mut succ: Vec<usize> = (0..n).collect();
    succ.shuffle(rng);
    let valuation: Vec<(String, Vec<usize>)> = atoms
        .iter()
        .map(|a| (a.clone(), (0..n).filter(|_| rng.gen_bool(0.5)).collect()))
        .collect();
    BijectiveModel::new(succ, valuation).expect("shuffle is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_have_their_kind() {
        let mut r = rng(7);
        for kind in FrameKind::ALL {
            for n in 0..9 {
                for _ in 0..20 {
                    let rel = random_relation(&mut r, n, kind);
                    assert!(rel.satisfies(kind).is_ok(), "{kind} on {n}");
                }
            }
        }
    }

    #[test]
    fn every_wk4_relation_on_two_points_is_reachable() {
        let mut r = rng(1);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..5000 {
            let rel = random_relation(&mut r, 2, FrameKind::WK4);
            seen.insert(rel.edges().collect::<Vec<_>>());
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn pltl_formula_counts() {
        let q = vec!["q".to_string()];
        let counts: Vec<usize> = (1..=5).map(|s| pltl_formulas_of_size(&q, s).len()).collect();
        assert_eq!(counts, vec![3, 15, 102, 780, 6411]);
        assert!(pltl_formulas_of_size(&q, 4).iter().all(|f| f.size() == 4));
    }

    #[test]
    fn generated_formulas_use_the_signature() {
        let (agents, atoms) = default_signature();
        let mut r = rng(3);
        for size in 1..20 {
            let f = random_formula(&mut r, &agents, &atoms, size, false);
            assert!(crate::syntax::star_free(&f));
            assert!(f.atoms().iter().all(|a| atoms.contains(a)));
            let g = random_positive_formula(&mut r, &agents, &atoms, 3);
            assert!(crate::syntax::modal_depth(&g) <= 3);
        }
    }

    #[test]
    fn seeds_reproduce() {
        let (agents, atoms) = default_signature();
        let a = random_formula(&mut rng(11), &agents, &atoms, 12, true);
        let b = random_formula(&mut rng(11), &agents, &atoms, 12, true);
        assert_eq!(a, b);
    }
}
