use std::collections::BTreeSet;

use super::{AlignConfig, AlignedPair, CandidateMatrix};

/// Best objective over every subset of candidate pairs, computed from the
/// preference definitions directly rather than from the integer program.
/// Returns `None` when there are more than `max_pairs` candidates.
pub fn brute_force_alignment(cand: &CandidateMatrix, config: &AlignConfig, max_pairs: usize) -> Option<(i64, Vec<AlignedPair>)> {
    let pairs = cand.pairs();
    if pairs.len() > max_pairs {
        return None;
    }
    let coverable = cand.coverable();
    let mut best: Option<(i64, Vec<AlignedPair>)> = None;
    for mask in 0u64..(1u64 << pairs.len()) {
        let chosen: Vec<AlignedPair> = (0..pairs.len()).filter(|b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
        let set: BTreeSet<AlignedPair> = chosen.iter().copied().collect();
        let covered = coverable
            .iter()
            .all(|&(k, j)| (0..cand.n).any(|i| set.contains(&(i, k, j))));
        if !covered {
            continue;
        }
        let value = score(cand, config, &set);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, chosen));
        }
    }
    best
}

/// The alignment objective evaluated on a set of pairs.
pub(crate) fn score(cand: &CandidateMatrix, config: &AlignConfig, set: &BTreeSet<AlignedPair>) -> i64 {
    let w = config.weights;
    let m = cand.num_steps();
    let n = cand.n;
    let mut value = 0i64;
    for &(i, k, j) in set {
        value -= w.min;
        if cand.b[k][j][i] {
            value += w.exact;
        }
    }
    // Runs of d+1 diagonal pairs, for every d up to the limit.
    for &(i, k, j) in set {
        for d in 1..=config.max_run {
            if (0..=d).all(|p| set.contains(&(i + p, k, j + p))) {
                value += w.seq;
            } else {
                break;
            }
        }
    }
    let uses = |k: usize, i: usize| set.iter().any(|&(qi, qk, _)| qi == i && qk == k);
    for i in 0..n {
        let steps = (0..m).filter(|&k| uses(k, i)).count() as i64;
        value -= w.unique * steps;
    }
    for k in 0..m {
        for k2 in 0..m {
            if !cand.r[k][k2] {
                continue;
            }
            for i in 0..n {
                if !uses(k, i) {
                    continue;
                }
                if i + 1 < n && uses(k2, i + 1) {
                    value += w.reference;
                }
                if i > 0 && uses(k2, i - 1) {
                    value += w.reference;
                }
            }
        }
    }
    value
}
