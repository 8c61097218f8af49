//! Generate-and-filter enumeration. Every labeled graph on up to `cap` nodes
//! is produced (tuple nodes labeled by first occurrence, the remaining
//! nodes in a topological order among themselves), filtered by the
//! structure definition, and deduplicated by canonical key.

use std::collections::BTreeMap;

use itertools::Itertools;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::structure::{CanonicalKey, Dag, TclStructure};

/// Refuses node caps whose search space is not enumerable in reasonable
/// time.
pub const MAX_BRUTE_NODES: usize = 8;

/// Restricted growth strings of length `l` with exactly `t` blocks.
fn tuple_labelings(l: usize, t: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(l);
    fn go(l: usize, t: usize, used: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == l {
            if used as usize == t {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=used.min(t as u32 - 1) {
            cur.push(v);
            go(l, t, used.max(v + 1), cur, out);
            cur.pop();
        }
    }
    if t == 0 {
        if l == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(l, t, 0, &mut cur, &mut out);
    out
}

fn child_options(n: usize, t: usize, u: usize, k: usize) -> Vec<u8> {
    // Tuple nodes may point anywhere else; other nodes only to tuple nodes
    // and later non-tuple nodes.
    let pool: Vec<usize> = (0..n)
        .filter(|&v| v != u && (u < t || v < t || v > u))
        .collect();
    (0..=k.min(pool.len()))
        .flat_map(|s| pool.iter().copied().combinations(s))
        .map(|c| c.into_iter().fold(0u8, |mask, v| mask | (1 << v)))
        .collect()
}

fn acyclic(masks: &[u8]) -> bool {
    let n = masks.len();
    let mut alive: u8 = if n == 8 { u8::MAX } else { (1u8 << n) - 1 };
    loop {
        // drop nodes with no live children
        let sinks = (0..n)
            .filter(|&u| alive & (1 << u) != 0 && masks[u] & alive == 0)
            .fold(0u8, |a, u| a | (1 << u));
        if sinks == 0 {
            return alive == 0;
        }
        alive &= !sinks;
    }
}

/// The structure definition checked directly on child bitmasks.
fn is_structure(masks: &[u8], tuple: &[u32], k: usize, m: u64) -> bool {
    let n = masks.len();
    let all: u8 = if n == 8 { u8::MAX } else { (1u8 << n) - 1 };
    let mut reached: u8 = tuple.iter().fold(0, |a, &t| a | (1 << t));
    let mut inner: u8 = 0;
    let mut frontier = reached;
    let mut steps = 0u64;
    while steps < m && frontier != 0 {
        inner |= frontier;
        let next = (0..n)
            .filter(|&u| frontier & (1 << u) != 0)
            .fold(0u8, |a, u| a | masks[u]);
        frontier = next & !reached;
        reached |= next;
        steps += 1;
    }
    if reached != all {
        return false;
    }
    let in_u = |u: usize| inner & (1 << u) != 0 || masks[u].count_ones() as usize == k;
    for u in 0..n {
        for v in u + 1..n {
            if in_u(u) && in_u(v) && masks[u] == masks[v] {
                return false;
            }
        }
    }
    true
}

fn scan(options: &[Vec<u8>], tuples: &[Vec<u32>], k: usize, m: u64) -> BTreeMap<CanonicalKey, Dag> {
    let n = options.len();
    let mut found = BTreeMap::new();
    let mut idx = vec![0usize; n];
    let mut masks = vec![0u8; n];
    loop {
        for u in 0..n {
            masks[u] = options[u][idx[u]];
        }
        if acyclic(&masks) {
            for tuple in tuples {
                if is_structure(&masks, tuple, k, m) {
                    let children = masks
                        .iter()
                        .map(|&mask| (0..n as u32).filter(|&v| mask & (1 << v) != 0).collect())
                        .collect();
                    let (canon, key) =
                        TclStructure::from_dag(Dag::new(children, tuple.clone())).canonicalize();
                    found.entry(key).or_insert_with(|| canon.dag().clone());
                }
            }
        }
        // advance the mixed-radix counter
        let mut i = 0;
        loop {
            if i == n {
                return found;
            }
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Canonical representatives of all `tcl^k_m(l)`-structures with at most
/// `cap` nodes, in key order. Returns `None` if `cap` exceeds
/// [`MAX_BRUTE_NODES`].
pub fn brute_enumerate(k: usize, m: u64, l: usize, cap: usize) -> Option<Vec<TclStructure>> {
    if cap > MAX_BRUTE_NODES {
        return None;
    }
    let mut jobs = Vec::new();
    for n in 0..=cap {
        for t in 0..=n.min(l) {
            let tuples = tuple_labelings(l, t);
            if tuples.is_empty() {
                continue;
            }
            let options: Vec<Vec<u8>> = (0..n).map(|u| child_options(n, t, u, k)).collect();
            if n == 0 {
                jobs.push((options, tuples));
                continue;
            }
            // Split on the first node's choice to give the pool work.
            for first in &options[0] {
                let mut o = options.clone();
                o[0] = vec![*first];
                jobs.push((o, tuples.clone()));
            }
        }
    }
    let run = |(options, tuples): &(Vec<Vec<u8>>, Vec<Vec<u32>>)| scan(options, tuples, k, m);
    #[cfg(feature = "parallel")]
    let maps: Vec<BTreeMap<CanonicalKey, Dag>> = jobs.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let maps: Vec<BTreeMap<CanonicalKey, Dag>> = jobs.iter().map(run).collect();
    let mut all = BTreeMap::new();
    for map in maps {
        all.extend(map);
    }
    Some(all.into_values().map(TclStructure::from_dag).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_strings() {
        assert_eq!(tuple_labelings(3, 2).len(), 3);
        assert_eq!(tuple_labelings(0, 0).len(), 1);
        assert_eq!(tuple_labelings(2, 0).len(), 0);
    }

    #[test]
    fn hand_checked_counts() {
        assert_eq!(brute_enumerate(1, 1, 1, 3).unwrap().len(), 2);
        assert_eq!(brute_enumerate(2, 0, 2, 2).unwrap().len(), 4);
        assert_eq!(brute_enumerate(0, 2, 3, 3).unwrap().len(), 1);
    }
}
