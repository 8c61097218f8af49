//! Canonical labeling by partition refinement with exhaustive branching on
//! the first non-singleton cell.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::dag::Dag;

/// Byte encoding of an isomorphism class. Equal keys mean isomorphic
/// structures (tuple positions fixed, node names forgotten).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey(Box<[u8]>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey(")?;
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

fn push_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

struct Ctx<'a> {
    dag: &'a Dag,
    parents: Vec<Vec<u32>>,
    colors: Option<&'a [u32]>,
}

/// Ranks signatures: every node gets the index of its signature in the
/// sorted list of distinct signatures.
fn rank_by<T: Ord + Clone>(sigs: &[T]) -> (Vec<u32>, usize) {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    let cells = sigs
        .iter()
        .map(|s| distinct.binary_search(s).unwrap() as u32)
        .collect();
    (cells, distinct.len())
}

impl Ctx<'_> {
    fn initial(&self) -> (Vec<u32>, usize) {
        let n = self.dag.len();
        let mut positions = vec![Vec::new(); n];
        for (i, &t) in self.dag.tuple.iter().enumerate() {
            positions[t as usize].push(i as u32);
        }
        let sigs: Vec<(Vec<u32>, u32, usize, usize)> = (0..n)
            .map(|u| {
                (
                    // Tuple nodes come first; they are singletons anyway.
                    std::mem::take(&mut positions[u]),
                    self.colors.map_or(0, |c| c[u]),
                    self.dag.children[u].len(),
                    self.parents[u].len(),
                )
            })
            .map(|(p, c, o, i)| (if p.is_empty() { vec![u32::MAX] } else { p }, c, o, i))
            .collect();
        rank_by(&sigs)
    }

    fn refine(&self, mut cells: Vec<u32>, mut count: usize) -> (Vec<u32>, usize) {
        let n = self.dag.len();
        loop {
            if count == n {
                return (cells, count);
            }
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
                .map(|u| {
                    let mut cs: Vec<u32> = self.dag.children[u]
                        .iter()
                        .map(|&v| cells[v as usize])
                        .collect();
                    cs.sort_unstable();
                    let mut ps: Vec<u32> =
                        self.parents[u].iter().map(|&v| cells[v as usize]).collect();
                    ps.sort_unstable();
                    (cells[u], cs, ps)
                })
                .collect();
            let (next, next_count) = rank_by(&sigs);
            if next_count == count {
                return (cells, count);
            }
            cells = next;
            count = next_count;
        }
    }

    fn encode(&self, perm: &[u32]) -> Vec<u8> {
        let n = self.dag.len();
        let mut inv = vec![0u32; n];
        for (u, &p) in perm.iter().enumerate() {
            inv[p as usize] = u as u32;
        }
        let mut out = Vec::with_capacity(4 + n * 3);
        push_varint(&mut out, n as u64);
        push_varint(&mut out, self.dag.tuple.len() as u64);
        for &t in &self.dag.tuple {
            push_varint(&mut out, u64::from(perm[t as usize]));
        }
        if let Some(colors) = self.colors {
            for &u in &inv {
                push_varint(&mut out, u64::from(colors[u as usize]));
            }
        }
        let mut buf = Vec::new();
        for &u in &inv {
            buf.clear();
            buf.extend(
                self.dag.children[u as usize]
                    .iter()
                    .map(|&v| perm[v as usize]),
            );
            buf.sort_unstable();
            push_varint(&mut out, buf.len() as u64);
            for &v in &buf {
                push_varint(&mut out, u64::from(v));
            }
        }
        out
    }

    /// Two members of a cell with identical neighborhoods can be swapped by
    /// an automorphism, so only one of them needs to be individualized.
    fn twins(&self, u: u32, v: u32) -> bool {
        let (u, v) = (u as usize, v as usize);
        self.dag.children[u] == self.dag.children[v] && {
            let mut pu = self.parents[u].clone();
            let mut pv = self.parents[v].clone();
            pu.sort_unstable();
            pv.sort_unstable();
            pu == pv
        }
    }

    fn search(&self, cells: Vec<u32>, count: usize, best: &mut Option<(Vec<u8>, Vec<u32>)>) {
        let (cells, count) = self.refine(cells, count);
        let n = self.dag.len();
        if count == n {
            let code = self.encode(&cells);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                *best = Some((code, cells));
            }
            return;
        }
        let mut sizes = vec![0usize; count];
        for &c in &cells {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
        let members: Vec<u32> = (0..n as u32)
            .filter(|&u| cells[u as usize] == target)
            .collect();
        let mut tried: Vec<u32> = Vec::new();
        for &v in &members {
            if tried.iter().any(|&t| self.twins(t, v)) {
                continue;
            }
            tried.push(v);
            // Individualize v: it keeps the cell index, everything ranked
            // after it shifts by one.
            let next: Vec<u32> = cells
                .iter()
                .enumerate()
                .map(|(u, &c)| {
                    if c > target || (c == target && u as u32 != v) {
                        c + 1
                    } else {
                        c
                    }
                })
                .collect();
            self.search(next, count + 1, best);
        }
    }
}

/// Returns the canonical relabeling (`perm[old] = new`) and the key.
/// `colors`, if given, must be preserved by isomorphisms.
pub(crate) fn canonical_labeling(dag: &Dag, colors: Option<&[u32]>) -> (Vec<u32>, CanonicalKey) {
    let ctx = Ctx {
        dag,
        parents: dag.parents(),
        colors,
    };
    if dag.is_empty() {
        return (Vec::new(), CanonicalKey(ctx.encode(&[]).into_boxed_slice()));
    }
    let (cells, count) = ctx.initial();
    let mut best = None;
    ctx.search(cells, count, &mut best);
    let (code, perm) = best.expect("search visits at least one leaf");
    (perm, CanonicalKey(code.into_boxed_slice()))
}

pub(crate) fn canonical_key(dag: &Dag, colors: Option<&[u32]>) -> CanonicalKey {
    canonical_labeling(dag, colors).1
}

/// Canonical relabeling of the graph together with its key.
pub(crate) fn canonical_dag(dag: &Dag) -> (Dag, CanonicalKey) {
    let (perm, key) = canonical_labeling(dag, None);
    (dag.permuted(&perm), key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeled_chains_agree() {
        let a = Dag::new(vec![vec![1], vec![]], vec![0]);
        let b = Dag::new(vec![vec![], vec![0]], vec![1]);
        assert_eq!(canonical_key(&a, None), canonical_key(&b, None));
        let reversed = Dag::new(vec![vec![], vec![0]], vec![0]);
        assert_ne!(canonical_key(&a, None), canonical_key(&reversed, None));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let d = Dag::new(vec![vec![2, 3], vec![3], vec![], vec![]], vec![1, 0]);
        let (c, k) = canonical_dag(&d);
        let (c2, k2) = canonical_dag(&c);
        assert_eq!(k, k2);
        assert_eq!(c, c2);
    }

    #[test]
    fn colors_distinguish() {
        let d = Dag::new(vec![vec![], vec![]], vec![]);
        assert_eq!(
            canonical_key(&d, Some(&[0, 1])),
            canonical_key(&d, Some(&[1, 0]))
        );
        assert_ne!(
            canonical_key(&d, Some(&[0, 0])),
            canonical_key(&d, Some(&[0, 1]))
        );
    }
}
