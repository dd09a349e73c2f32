//! Relations of each frame kind over `{0..n-1}` as successor masks, and
//! isomorphism pruning by minimal adjacency encodings.

use crate::spaces::FrameKind;

pub type Rows = Vec<u64>;

/// Largest carrier for brute-force enumeration of relational kinds.
pub const RELATIONAL_LIMIT: usize = 5;
/// Largest carrier on which isomorphism pruning runs.
pub const SYMMETRY_LIMIT: usize = 8;

fn weakly_transitive(rows: &[u64], strict: bool) -> bool {
    rows.iter().enumerate().all(|(w, &row)| {
        let allowed = if strict { row } else { row | 1 << w };
        let mut succ = row;
        while succ != 0 {
            let s = succ.trailing_zeros() as usize;
            succ &= succ - 1;
            if rows[s] & !allowed != 0 {
                return false;
            }
        }
        true
    })
}

/// Whether mask rows have the property of `kind`.
pub fn rows_satisfy(rows: &[u64], kind: FrameKind) -> bool {
    let reflexive = || rows.iter().enumerate().all(|(w, &r)| r >> w & 1 == 1);
    let irreflexive = || rows.iter().enumerate().all(|(w, &r)| r >> w & 1 == 0);
    let symmetric = || {
        rows.iter()
            .enumerate()
            .all(|(w, &r)| (0..rows.len()).all(|v| r >> v & 1 == 0 || rows[v] >> w & 1 == 1))
    };
    match kind {
        FrameKind::WK4 => weakly_transitive(rows, false),
        FrameKind::K4 => weakly_transitive(rows, true),
        FrameKind::S4 => reflexive() && weakly_transitive(rows, true),
        FrameKind::Equivalence => reflexive() && symmetric() && weakly_transitive(rows, true),
        FrameKind::IrreflexiveWK4 => irreflexive() && weakly_transitive(rows, false),
        FrameKind::MonadicDerivative => irreflexive() && symmetric() && weakly_transitive(rows, false),
    }
}

fn relational(n: usize, kind: FrameKind) -> Vec<Rows> {
    let loops = match kind {
        FrameKind::S4 => Some(true),
        FrameKind::IrreflexiveWK4 => Some(false),
        _ => None,
    };
    let width = if loops.is_some() { n - 1 } else { n };
    let chunk = (1u64 << width) - 1;
    let mut out = Vec::new();
    for bits in 0u64..1 << (width * n) {
        let rows: Rows = (0..n)
            .map(|w| {
                let c = bits >> (w * width) & chunk;
                match loops {
                    None => c,
                    Some(refl) => {
                        let spread = (c & ((1 << w) - 1)) | (c >> w) << (w + 1);
                        spread | (refl as u64) << w
                    }
                }
            })
            .collect();
        if rows_satisfy(&rows, kind) {
            out.push(rows);
        }
    }
    out
}

/// Set partitions of `{0..n-1}` with block sizes in `min..=max`, as block
/// assignments, in lexicographic order of the pair lists for matchings.
fn partitions(n: usize, min: usize, max: usize) -> Vec<Vec<u64>> {
    fn go(n: usize, min: usize, max: usize, used: u64, blocks: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let Some(first) = (0..n).find(|&i| used >> i & 1 == 0) else {
            out.push(blocks.clone());
            return;
        };
        // grow a block containing `first` from later unused points, in increasing order
        fn grow(
            n: usize,
            min: usize,
            max: usize,
            used: u64,
            block: u64,
            from: usize,
            blocks: &mut Vec<u64>,
            out: &mut Vec<Vec<u64>>,
        ) {
            let size = block.count_ones() as usize;
            if size >= min {
                blocks.push(block);
                go(n, min, max, used | block, blocks, out);
                blocks.pop();
            }
            if size < max {
                for v in from..n {
                    if used >> v & 1 == 0 {
                        grow(n, min, max, used, block | 1 << v, v + 1, blocks, out);
                    }
                }
            }
        }
        grow(n, min, max, used, 1 << first, first + 1, blocks, out);
    }
    let mut out = Vec::new();
    go(n, min, max, 0, &mut Vec::new(), &mut out);
    out
}

fn block_rows(n: usize, blocks: &[u64], reflexive: bool) -> Rows {
    let mut rows = vec![0; n];
    for &b in blocks {
        for (w, row) in rows.iter_mut().enumerate() {
            if b >> w & 1 == 1 {
                *row = if reflexive { b } else { b & !(1 << w) };
            }
        }
    }
    rows
}

/// Every relation of `kind` on `n` points. Relational kinds are limited to
/// [`RELATIONAL_LIMIT`] points; monadic derivative frames are unions of
/// 2-clusters, plus isolated points when `allow_singletons`.
pub fn frames(n: usize, kind: FrameKind, allow_singletons: bool) -> Option<Vec<Rows>> {
    match kind {
        FrameKind::Equivalence => Some(partitions(n, 1, n.max(1)).iter().map(|b| block_rows(n, b, true)).collect()),
        FrameKind::MonadicDerivative => {
            let min = if allow_singletons { 1 } else { 2 };
            Some(partitions(n, min, 2).iter().map(|b| block_rows(n, b, false)).collect())
        }
        _ if n > RELATIONAL_LIMIT => None,
        _ => Some(relational(n, kind)),
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn map_bits(mut mask: u64, p: &[u8]) -> u64 {
    let mut out = 0;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        out |= 1 << p[v];
    }
    out
}

/// `σR`: the edge `(w, v)` becomes `(σw, σv)`.
pub fn permute(rows: &[u64], p: &[u8]) -> Rows {
    let mut out = vec![0; rows.len()];
    for (w, &r) in rows.iter().enumerate() {
        out[p[w] as usize] = map_bits(r, p);
    }
    out
}

/// Row-major adjacency encoding; needs `n ≤ 8`.
pub fn encode(rows: &[u64]) -> u64 {
    let n = rows.len();
    rows.iter().enumerate().fold(0, |acc, (w, &r)| acc | r << (w * n))
}

/// Whether `rows` has the least encoding among its images under `group`.
pub fn is_minimal(rows: &[u64], group: &[Vec<u8>]) -> bool {
    let e = encode(rows);
    group.iter().all(|p| encode(&permute(rows, p)) >= e)
}

pub fn stabilizer(rows: &[u64], group: &[Vec<u8>]) -> Vec<Vec<u8>> {
    group.iter().filter(|p| permute(rows, p) == rows).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_counts() {
        // loop-free weakly transitive relations are the irreflexive ones
        assert_eq!(frames(3, FrameKind::WK4, false).unwrap().len(), 232);
        assert_eq!(frames(4, FrameKind::WK4, false).unwrap().len(), 5680);
        assert_eq!(frames(4, FrameKind::IrreflexiveWK4, false).unwrap().len(), 355);
        // transitive relations and preorders on 3 points
        assert_eq!(frames(3, FrameKind::K4, false).unwrap().len(), 171);
        assert_eq!(frames(3, FrameKind::S4, false).unwrap().len(), 29);
        assert!(frames(6, FrameKind::WK4, false).is_none());
    }

    #[test]
    fn partition_counts() {
        assert_eq!(frames(4, FrameKind::Equivalence, false).unwrap().len(), 15);
        assert_eq!(frames(6, FrameKind::MonadicDerivative, false).unwrap().len(), 15);
        assert_eq!(frames(5, FrameKind::MonadicDerivative, false).unwrap().len(), 0);
        assert_eq!(frames(4, FrameKind::MonadicDerivative, true).unwrap().len(), 10);
        assert_eq!(frames(0, FrameKind::MonadicDerivative, false).unwrap().len(), 1);
    }

    #[test]
    fn matchings_come_in_lexicographic_order() {
        let m = frames(4, FrameKind::MonadicDerivative, false).unwrap();
        // {01,23}, {02,13}, {03,12}
        assert_eq!(m[0], vec![0b0010, 0b0001, 0b1000, 0b0100]);
        assert_eq!(m[1], vec![0b0100, 0b1000, 0b0001, 0b0010]);
        assert_eq!(m[2], vec![0b1000, 0b0100, 0b0010, 0b0001]);
    }

    #[test]
    fn generated_frames_have_their_kind() {
        for kind in FrameKind::ALL {
            for rows in frames(3, kind, true).unwrap() {
                assert!(rows_satisfy(&rows, kind), "{kind}: {rows:?}");
            }
        }
    }

    #[test]
    fn orbit_representatives() {
        let perms = permutations(4);
        assert_eq!(perms.len(), 24);
        let reps = |kind| {
            frames(4, kind, false)
                .unwrap()
                .into_iter()
                .filter(|r| is_minimal(r, &perms))
                .count()
        };
        // one perfect matching on 4 points up to isomorphism; 5 partitions of 4
        assert_eq!(reps(FrameKind::MonadicDerivative), 1);
        assert_eq!(reps(FrameKind::Equivalence), 5);
        // preorders on 3 points up to isomorphism
        let perms3 = permutations(3);
        let s4 = frames(3, FrameKind::S4, false).unwrap();
        assert_eq!(s4.iter().filter(|r| is_minimal(r, &perms3)).count(), 9);
        let m = &frames(4, FrameKind::MonadicDerivative, false).unwrap()[0];
        assert_eq!(stabilizer(m, &perms).len(), 8);
    }
}
