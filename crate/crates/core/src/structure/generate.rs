//! Layered generation of the structures compatible with a base structure.
//!
//! A candidate joint structure `W` holds every node of the base `S` plus
//! fresh nodes. Nodes are discovered breadth-first from the extended tuple,
//! and each node's children are fixed when it is processed. Base nodes keep
//! their edges; a base node at the outer level of `S` with spare capacity
//! may gain fresh children. States are deduplicated after every step by
//! canonical key with the base nodes pinned.

use std::collections::BTreeMap;

use itertools::Itertools;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::canon::{canonical_key, canonical_labeling, CanonicalKey};
use super::dag::{Dag, UNREACHED};
use crate::limits::{LimitError, Limits};

const UNDISCOVERED: u8 = 0;
const CURRENT: u8 = 1;
const NEXT: u8 = 2;
const DONE: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Dedup {
    /// One result per extension up to isomorphism fixing the base pointwise.
    FixBase,
    /// One result per isomorphism class of the extended structure alone.
    Restriction,
}

#[derive(Clone, Debug)]
pub(crate) struct Extension {
    /// The extended structure, restricted to the new level.
    pub dag: Dag,
    pub key: CanonicalKey,
    /// For each node of `dag`, its index in the joint structure; indices
    /// below the base size are base nodes.
    pub origin: Vec<u32>,
}

struct Base<'a> {
    dag: &'a Dag,
    k: usize,
    m_prime: u32,
    /// Base nodes strictly inside level `m` of the base structure.
    inner: Vec<bool>,
    /// How many fresh children each base node may still gain.
    spare: Vec<usize>,
}

#[derive(Clone)]
struct State {
    children: Vec<Vec<u32>>,
    dist: Vec<u32>,
    status: Vec<u8>,
    ext: Vec<u32>,
    layer: u32,
}

impl Base<'_> {
    fn size(&self) -> usize {
        self.dag.len()
    }

    fn in_u(&self, st: &State, y: usize) -> bool {
        (y < self.size() && self.inner[y])
            || (st.dist[y] != UNREACHED && st.dist[y] < self.m_prime)
            || st.children[y].len() == self.k
    }

    fn is_final(&self, st: &State, y: usize) -> bool {
        st.status[y] == DONE || (y < self.size() && self.spare[y] == 0)
    }

    fn joint(&self, st: &State) -> Dag {
        let mut tuple = self.dag.tuple.clone();
        tuple.extend(&st.ext);
        Dag {
            children: st.children.clone(),
            tuple,
        }
    }

    fn pinned(&self, st: &State) -> Dag {
        let mut tuple: Vec<u32> = (0..self.size() as u32).collect();
        tuple.extend(&st.ext);
        Dag {
            children: st.children.clone(),
            tuple,
        }
    }

    fn state_key(&self, st: &State) -> (u32, CanonicalKey) {
        let colors: Vec<u32> = (0..st.status.len())
            .map(|y| match st.status[y] {
                DONE if st.dist[y] == self.m_prime => 4,
                s => u32::from(s),
            })
            .collect();
        (st.layer, canonical_key(&self.pinned(st), Some(&colors)))
    }

    /// Moves to the next layer when the current one is exhausted. Returns
    /// false when no node is left to process.
    fn normalize(&self, st: &mut State) -> bool {
        if st.status.contains(&CURRENT) {
            return true;
        }
        if st.layer >= self.m_prime || !st.status.contains(&NEXT) {
            return false;
        }
        st.layer += 1;
        for s in st.status.iter_mut() {
            if *s == NEXT {
                *s = CURRENT;
            }
        }
        true
    }

    fn ancestors(&self, st: &State, x: u32) -> Vec<bool> {
        let n = st.children.len();
        let mut parents = vec![Vec::new(); n];
        for (u, cs) in st.children.iter().enumerate() {
            for &v in cs {
                parents[v as usize].push(u as u32);
            }
        }
        let mut seen = vec![false; n];
        seen[x as usize] = true;
        let mut stack = vec![x];
        while let Some(u) = stack.pop() {
            for &p in &parents[u as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    fn extensional_so_far(&self, st: &State, x: usize) -> bool {
        if !self.in_u(st, x) {
            return true;
        }
        (0..st.children.len()).all(|y| {
            y == x || !self.is_final(st, y) || !self.in_u(st, y) || st.children[y] != st.children[x]
        })
    }

    fn extensional(&self, st: &State) -> bool {
        let dag = Dag {
            children: st.children.clone(),
            tuple: Vec::new(),
        };
        dag.extensional_on(|y| self.in_u(st, y as usize))
    }

    /// Processes the first unprocessed node of the current layer in every
    /// possible way.
    fn expand(&self, st: &State) -> Vec<State> {
        let b = self.size();
        let x = st
            .status
            .iter()
            .position(|&s| s == CURRENT)
            .expect("normalized state") as u32;
        let d = st.layer;
        let inside = d < self.m_prime;
        let fresh = x as usize >= b;
        let cap = if fresh {
            self.k
        } else {
            self.spare[x as usize]
        };
        let candidates: Vec<u32> = if cap == 0 {
            Vec::new()
        } else {
            let anc = self.ancestors(st, x);
            let lo = if fresh { 0 } else { b as u32 };
            (lo..st.children.len() as u32)
                .filter(|&y| !anc[y as usize] && (inside || st.status[y as usize] != UNDISCOVERED))
                .collect()
        };
        let max_new = if inside { cap } else { 0 };
        let mut out = Vec::new();
        for s in 0..=cap.min(candidates.len()) {
            for combo in candidates.iter().copied().combinations(s) {
                for j in 0..=(cap - s).min(max_new) {
                    let mut next = st.clone();
                    let mut kids = next.children[x as usize].clone();
                    kids.extend(&combo);
                    for _ in 0..j {
                        let id = next.children.len() as u32;
                        next.children.push(Vec::new());
                        next.dist.push(d + 1);
                        next.status.push(NEXT);
                        kids.push(id);
                    }
                    kids.sort_unstable();
                    if inside {
                        for &v in &kids {
                            if next.status[v as usize] == UNDISCOVERED {
                                next.status[v as usize] = NEXT;
                                next.dist[v as usize] = d + 1;
                            }
                        }
                    }
                    next.children[x as usize] = kids;
                    next.status[x as usize] = DONE;
                    if self.extensional_so_far(&next, x as usize) {
                        out.push(next);
                    }
                }
            }
        }
        out
    }

    fn initial_states(&self, p: usize) -> Vec<State> {
        let b = self.size();
        let mut choices: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..p {
            let mut grown = Vec::new();
            for ext in &choices {
                let fresh_so_far = ext
                    .iter()
                    .filter(|&&c| c as usize >= b)
                    .max()
                    .map_or(0, |&c| c as usize + 1 - b);
                for c in 0..(b + fresh_so_far + 1) as u32 {
                    let mut e = ext.clone();
                    e.push(c);
                    grown.push(e);
                }
            }
            choices = grown;
        }
        choices
            .into_iter()
            .map(|ext| {
                let fresh = ext
                    .iter()
                    .filter(|&&c| c as usize >= b)
                    .max()
                    .map_or(0, |&c| c as usize + 1 - b);
                let n = b + fresh;
                let mut children = self.dag.children.clone();
                children.resize(n, Vec::new());
                let mut dist = vec![UNREACHED; n];
                let mut status = vec![UNDISCOVERED; n];
                for &t in self.dag.tuple.iter().chain(&ext) {
                    dist[t as usize] = 0;
                    status[t as usize] = CURRENT;
                }
                State {
                    children,
                    dist,
                    status,
                    ext,
                    layer: 0,
                }
            })
            .collect()
    }

    fn finish(&self, st: &State, mode: Dedup) -> Extension {
        let joint = self.joint(st);
        let positions: Vec<usize> = (0..joint.tuple.len()).collect();
        let (restricted, keep) = joint.restrict(u64::from(self.m_prime), &positions);
        match mode {
            Dedup::FixBase => {
                let colors: Vec<u32> = (0..st.status.len())
                    .map(|y| u32::from(st.dist[y] == UNREACHED))
                    .collect();
                Extension {
                    dag: restricted,
                    key: canonical_key(&self.pinned(st), Some(&colors)),
                    origin: keep,
                }
            }
            Dedup::Restriction => {
                let (perm, key) = canonical_labeling(&restricted, None);
                let mut origin = vec![0; keep.len()];
                for (i, &w) in keep.iter().enumerate() {
                    origin[perm[i] as usize] = w;
                }
                Extension {
                    dag: restricted.permuted(&perm),
                    key,
                    origin,
                }
            }
        }
    }
}

fn map_states<T: Send, F>(items: Vec<State>, parallel: bool, f: F) -> Vec<T>
where
    F: Fn(State) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items.into_par_iter().map(f).collect();
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

fn dedup_by_key<K: Ord + Send, T: Send>(mut items: Vec<(K, T)>) -> Vec<(K, T)> {
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.dedup_by(|a, b| a.0 == b.0);
    items
}

/// All extensions of `base` (a structure at level `m`) by `p` tuple entries
/// to level `m_prime`, sorted by key.
pub(crate) fn generate(
    base: &Dag,
    k: usize,
    m: u64,
    p: usize,
    m_prime: u32,
    mode: Dedup,
    limits: &Limits,
) -> Result<Vec<Extension>, LimitError> {
    let dist = base.distances(&base.tuple, m);
    let ctx = Base {
        dag: base,
        k,
        m_prime,
        inner: dist.iter().map(|&d| u64::from(d) < m).collect(),
        spare: (0..base.len())
            .map(|u| {
                if dist[u] != UNREACHED && u64::from(dist[u]) == m {
                    k.saturating_sub(base.children[u].len())
                } else {
                    0
                }
            })
            .collect(),
    };
    let parallel = limits.parallel;
    let keyed = map_states(ctx.initial_states(p), parallel, |st| {
        (ctx.state_key(&st), st)
    });
    let mut frontier: Vec<State> = dedup_by_key(keyed).into_iter().map(|(_, s)| s).collect();
    let mut done: Vec<State> = Vec::new();
    frontier.retain_mut(|st| {
        let live = ctx.normalize(st);
        if !live && ctx.extensional(st) {
            done.push(st.clone());
        }
        live
    });
    let mut results: BTreeMap<CanonicalKey, Extension> = BTreeMap::new();
    let cap_error = || LimitError::ClassCap {
        cap: limits.max_classes,
    };
    loop {
        // finished states are canonicalized as they appear to bound memory
        let finished = map_states(std::mem::take(&mut done), parallel, |st| {
            ctx.finish(&st, mode)
        });
        for e in finished {
            results.entry(e.key.clone()).or_insert(e);
        }
        if results.len() > limits.max_classes {
            return Err(cap_error());
        }
        if frontier.is_empty() {
            break;
        }
        limits.check_deadline()?;
        let expanded = map_states(frontier, parallel, |st| {
            ctx.expand(&st)
                .into_iter()
                .map(|mut s| {
                    let live = ctx.normalize(&mut s);
                    (live, s)
                })
                .collect::<Vec<_>>()
        });
        let mut live = Vec::new();
        for (is_live, st) in expanded.into_iter().flatten() {
            if is_live {
                live.push(st);
            } else if ctx.extensional(&st) {
                done.push(st);
            }
            if live.len() + done.len() > limits.max_classes {
                return Err(cap_error());
            }
        }
        let keyed = map_states(live, parallel, |st| (ctx.state_key(&st), st));
        frontier = dedup_by_key(keyed).into_iter().map(|(_, s)| s).collect();
    }
    Ok(results.into_values().collect())
}

/// Canonical representatives of all `tcl^k_m(l)`-structures.
pub(crate) fn enumerate_dags(
    k: usize,
    m: u32,
    l: usize,
    limits: &Limits,
) -> Result<Vec<(Dag, CanonicalKey)>, LimitError> {
    let exts = generate(&Dag::empty(), k, 0, l, m, Dedup::Restriction, limits)?;
    Ok(exts.into_iter().map(|e| (e.dag, e.key)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(k: usize, m: u32, l: usize) -> usize {
        enumerate_dags(k, m, l, &Limits::default()).unwrap().len()
    }

    #[test]
    fn small_enumeration_counts() {
        assert_eq!(count(1, 1, 1), 2);
        // root with no child, one child, two children, and two children one
        // of which contains the other ({∅, {∅}} seen one level deep)
        assert_eq!(count(2, 1, 1), 4);
        assert_eq!(count(2, 0, 2), 4);
        assert_eq!(count(0, 0, 2), 1);
        assert_eq!(count(0, 3, 2), 1);
        assert_eq!(count(1, 3, 1), 4);
    }

    #[test]
    fn enumerated_structures_are_valid() {
        for (d, _) in enumerate_dags(2, 1, 2, &Limits::default()).unwrap() {
            assert!(d.is_tcl(2, 1), "{d:?}");
        }
    }

    #[test]
    fn extensions_of_a_root() {
        let root = Dag::new(vec![vec![]], vec![0]);
        let exts = generate(&root, 1, 3, 1, 0, Dedup::FixBase, &Limits::default()).unwrap();
        assert_eq!(exts.len(), 3);
        let empty = generate(
            &Dag::empty(),
            1,
            0,
            1,
            3,
            Dedup::FixBase,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(empty.len(), 4);
        let lone = generate(
            &Dag::empty(),
            2,
            0,
            1,
            0,
            Dedup::FixBase,
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(lone.len(), 1);
    }
}
