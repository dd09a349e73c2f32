use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use super::{SearchError, SearchOutcome, SizeStats, Verdict, SEARCH_LIMIT};
use crate::pltl::{eval_pltl_finite, holds_at_finite, BijectiveModel};
use crate::syntax::PltlFormula;

/// Integer partitions of `n` with nondecreasing parts.
fn cycle_types(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in min..=rest {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

/// Words of length `len` over `0..alphabet` that are least among their rotations.
fn necklaces(len: usize, alphabet: usize) -> Vec<Vec<usize>> {
    let total = alphabet.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = code % alphabet;
                code /= alphabet;
            }
            w
        })
        .filter(|w| (1..len).all(|r| w[r..].iter().chain(&w[..r]).cmp(w.iter()).is_ge()))
        .collect()
}

fn model_of(succ: Vec<usize>, letters: &[usize], atoms: &[String]) -> BijectiveModel {
    let valuation = atoms.iter().enumerate().map(|(k, a)| {
        let members = (0..letters.len()).filter(|&i| letters[i] >> k & 1 == 1).collect();
        (a.clone(), members)
    });
    BijectiveModel::new(succ, valuation).expect("permutation")
}

/// Visits bijective models on `n` points over `atoms`. When `reduced`, one
/// model per isomorphism class: cycles are laid out consecutively by
/// nondecreasing length, each cycle's valuation is a necklace, and cycles
/// of equal length carry necklaces in nondecreasing order. Otherwise every
/// permutation with every valuation.
pub fn bijective_models<F>(n: usize, atoms: &[String], reduced: bool, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&BijectiveModel) -> ControlFlow<()>,
{
    let alphabet = 1usize << atoms.len();
    if !reduced {
        for perm in super::permutations(n) {
            let succ: Vec<usize> = perm.iter().map(|&p| p as usize).collect();
            for code in 0..alphabet.pow(n as u32) {
                let mut c = code;
                let letters: Vec<usize> = (0..n)
                    .map(|_| {
                        let l = c % alphabet;
                        c /= alphabet;
                        l
                    })
                    .collect();
                visit(&model_of(succ.clone(), &letters, atoms))?;
            }
        }
        return ControlFlow::Continue(());
    }
    for parts in cycle_types(n) {
        let mut succ = Vec::with_capacity(n);
        let mut start = 0;
        for &len in &parts {
            succ.extend((0..len).map(|i| start + (i + 1) % len));
            start += len;
        }
        let necks: Vec<Vec<Vec<usize>>> = parts.iter().map(|&l| necklaces(l, alphabet)).collect();
        fn choose<F: FnMut(&BijectiveModel) -> ControlFlow<()>>(
            i: usize,
            parts: &[usize],
            necks: &[Vec<Vec<usize>>],
            chosen: &mut Vec<usize>,
            succ: &[usize],
            atoms: &[String],
            visit: &mut F,
        ) -> ControlFlow<()> {
            if i == parts.len() {
                let letters: Vec<usize> = chosen.iter().enumerate().flat_map(|(c, &k)| necks[c][k].clone()).collect();
                return visit(&model_of(succ.to_vec(), &letters, atoms));
            }
            let from = if i > 0 && parts[i] == parts[i - 1] { chosen[i - 1] } else { 0 };
            for k in from..necks[i].len() {
                chosen.push(k);
                choose(i + 1, parts, necks, chosen, succ, atoms, visit)?;
                chosen.pop();
            }
            ControlFlow::Continue(())
        }
        choose(0, &parts, &necks, &mut Vec::new(), &succ, atoms, &mut visit)?;
    }
    ControlFlow::Continue(())
}

/// Searches bijective models with `1..=max_size` points, up to isomorphism,
/// for one where `f` holds somewhere.
pub fn pltl_finite_search(
    f: &PltlFormula,
    max_size: usize,
    budget: Option<Duration>,
) -> Result<SearchOutcome<BijectiveModel>, SearchError> {
    if max_size > SEARCH_LIMIT {
        return Err(SearchError::TooLarge(max_size));
    }
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let start = Instant::now();
    let deadline = budget.map(|b| start + b);
    let mut sizes = Vec::new();
    for n in 1..=max_size {
        let size_start = Instant::now();
        let mut checked = 0u64;
        let mut found = None;
        let mut timed_out = false;
        let mut error = None;
        let _ = bijective_models(n, &atoms, true, |m| {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                timed_out = true;
                return ControlFlow::Break(());
            }
            checked += 1;
            match eval_pltl_finite(m, f) {
                Ok(s) if !s.is_empty() => {
                    found = Some((m.clone(), s.first().expect("nonempty")));
                    ControlFlow::Break(())
                }
                Ok(_) => ControlFlow::Continue(()),
                Err(e) => {
                    error = Some(e);
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(e) = error {
            return Err(SearchError::WitnessRejected(e.to_string()));
        }
        let mut stats = SizeStats {
            n,
            verdict: "UNSAT",
            frames: checked,
            models_checked: checked,
            pruned: 0,
            ms: size_start.elapsed().as_millis() as u64,
        };
        if let Some((model, point)) = found {
            if !holds_at_finite(&model, point, f).map_err(|e| SearchError::WitnessRejected(e.to_string()))? {
                return Err(SearchError::WitnessRejected(format!("formula fails at point {point}")));
            }
            stats.verdict = "SAT";
            sizes.push(stats);
            return Ok(SearchOutcome {
                verdict: Verdict::Sat { model, point },
                sizes,
                elapsed: start.elapsed(),
            });
        }
        if timed_out {
            stats.verdict = "TIMEOUT";
            sizes.push(stats);
            return Ok(SearchOutcome {
                verdict: Verdict::Timeout,
                sizes,
                elapsed: start.elapsed(),
            });
        }
        sizes.push(stats);
    }
    Ok(SearchOutcome {
        verdict: Verdict::Unsat { up_to: max_size },
        sizes,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_pltl;

    fn count(n: usize, atoms: usize, reduced: bool) -> usize {
        let atoms: Vec<String> = (0..atoms).map(|i| format!("p{i}")).collect();
        let mut c = 0;
        let _ = bijective_models(n, &atoms, reduced, |_| {
            c += 1;
            ControlFlow::Continue(())
        });
        c
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(cycle_types(4).len(), 5);
        assert_eq!(necklaces(4, 2).len(), 6);
        assert_eq!(necklaces(6, 2).len(), 14);
        assert_eq!(count(3, 1, false), 6 * 8);
        // unlabelled functional digraphs of permutations with one coloured atom:
        // n = 1: 2, n = 2: 2 fixpoint pairs (3 multisets) + 3 necklaces of length 2
        assert_eq!(count(1, 1, true), 2);
        assert_eq!(count(2, 1, true), 6);
    }

    #[test]
    fn witness_is_unsat_up_to_six() {
        let f = PltlFormula::future_not_past("q");
        let out = pltl_finite_search(&f, 6, None).unwrap();
        assert_eq!(out.verdict, Verdict::Unsat { up_to: 6 });
        assert_eq!(out.sizes.len(), 6);
    }

    #[test]
    fn small_satisfiable_formulas() {
        let out = pltl_finite_search(&parse_pltl("F q").unwrap(), 3, None).unwrap();
        let Verdict::Sat { model, point } = out.verdict else { panic!() };
        assert_eq!(model.size(), 1);
        assert!(model.valuation("q").unwrap().contains(point));

        let out = pltl_finite_search(&parse_pltl("X q & ~q").unwrap(), 3, None).unwrap();
        let Verdict::Sat { model, point } = out.verdict else { panic!() };
        assert_eq!(model.size(), 2);
        assert_eq!(model.succ(), &[1, 0]);
        assert!(!model.valuation("q").unwrap().contains(point));
    }

    #[test]
    fn reduced_and_full_enumerations_agree() {
        let formulas = ["F q & ~P q", "X q & ~q & Y ~q", "X X q & ~q & X ~q", "q & X p & ~Y p"];
        for text in formulas {
            let f = parse_pltl(text).unwrap();
            let atoms: Vec<String> = f.atoms().into_iter().collect();
            for n in 1..=4 {
                let mut sat = [false, false];
                for (i, reduced) in [true, false].into_iter().enumerate() {
                    let _ = bijective_models(n, &atoms, reduced, |m| {
                        if !eval_pltl_finite(m, &f).unwrap().is_empty() {
                            sat[i] = true;
                            return ControlFlow::Break(());
                        }
                        ControlFlow::Continue(())
                    });
                }
                assert_eq!(sat[0], sat[1], "{text} at n = {n}");
            }
        }
    }
}
