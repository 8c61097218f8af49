use std::collections::{HashSet, VecDeque};

pub(crate) const UNREACHED: u32 = u32::MAX;

/// Index-based graph with a distinguished tuple. An edge `u -> v` means
/// `v ∈ u`. Child lists are kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dag {
    pub(crate) children: Vec<Vec<u32>>,
    pub(crate) tuple: Vec<u32>,
}

impl Dag {
    pub fn new(mut children: Vec<Vec<u32>>, tuple: Vec<u32>) -> Self {
        for c in &mut children {
            c.sort_unstable();
            c.dedup();
        }
        Dag { children, tuple }
    }

    pub fn empty() -> Self {
        Dag::default()
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, u: u32) -> &[u32] {
        &self.children[u as usize]
    }

    pub fn tuple(&self) -> &[u32] {
        &self.tuple
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.children[u as usize].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn max_out_degree(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub(crate) fn parents(&self) -> Vec<Vec<u32>> {
        let mut parents = vec![Vec::new(); self.len()];
        for (u, cs) in self.children.iter().enumerate() {
            for &v in cs {
                parents[v as usize].push(u as u32);
            }
        }
        parents
    }

    /// BFS distances from `sources`, exploring at most `limit` steps.
    /// Nodes farther away are [`UNREACHED`].
    pub(crate) fn distances(&self, sources: &[u32], limit: u64) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize] == UNREACHED {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize];
            if u64::from(d) >= limit {
                continue;
            }
            for &v in &self.children[u as usize] {
                if dist[v as usize] == UNREACHED {
                    dist[v as usize] = d + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on out-edges.
        let mut indeg = vec![0usize; self.len()];
        for cs in &self.children {
            for &v in cs {
                indeg[v as usize] += 1;
            }
        }
        let mut stack: Vec<u32> = (0..self.len() as u32)
            .filter(|&u| indeg[u as usize] == 0)
            .collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &self.children[u as usize] {
                indeg[v as usize] -= 1;
                if indeg[v as usize] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == self.len()
    }

    /// Induced substructure on the nodes within `limit` steps of the selected
    /// tuple positions. Returns the new graph and, for each new node, its
    /// index in `self`. New node order follows old index order.
    pub(crate) fn restrict(&self, limit: u64, positions: &[usize]) -> (Dag, Vec<u32>) {
        let sources: Vec<u32> = positions.iter().map(|&i| self.tuple[i]).collect();
        let dist = self.distances(&sources, limit);
        let keep: Vec<u32> = (0..self.len() as u32)
            .filter(|&u| dist[u as usize] != UNREACHED)
            .collect();
        let mut index = vec![UNREACHED; self.len()];
        for (i, &u) in keep.iter().enumerate() {
            index[u as usize] = i as u32;
        }
        let children = keep
            .iter()
            .map(|&u| {
                self.children[u as usize]
                    .iter()
                    .filter_map(|&v| {
                        let j = index[v as usize];
                        (j != UNREACHED).then_some(j)
                    })
                    .collect()
            })
            .collect();
        let tuple = sources.iter().map(|&s| index[s as usize]).collect();
        (Dag { children, tuple }, keep)
    }

    /// Checks membership in the `tcl^k_m(l)` class: acyclic with out-degree
    /// at most `k`, every node within `m` steps of the tuple, and
    /// extensional on the determined nodes.
    pub fn is_tcl(&self, k: usize, m: u64) -> bool {
        if self.max_out_degree() > k || !self.is_acyclic() {
            return false;
        }
        let dist = self.distances(&self.tuple, m);
        if dist.contains(&UNREACHED) {
            return false;
        }
        self.extensional_on(|u| {
            u64::from(dist[u as usize]) < m || self.children[u as usize].len() == k
        })
    }

    /// Distinct nodes in the selected set have distinct child sets.
    pub(crate) fn extensional_on(&self, in_u: impl Fn(u32) -> bool) -> bool {
        let mut seen: HashSet<&[u32]> = HashSet::new();
        (0..self.len() as u32)
            .filter(|&u| in_u(u))
            .all(|u| seen.insert(&self.children[u as usize]))
    }

    /// Relabels nodes: node `u` becomes `perm[u]`.
    pub(crate) fn permuted(&self, perm: &[u32]) -> Dag {
        let mut children = vec![Vec::new(); self.len()];
        for (u, cs) in self.children.iter().enumerate() {
            let mut mapped: Vec<u32> = cs.iter().map(|&v| perm[v as usize]).collect();
            mapped.sort_unstable();
            children[perm[u] as usize] = mapped;
        }
        let tuple = self.tuple.iter().map(|&t| perm[t as usize]).collect();
        Dag { children, tuple }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(len: usize) -> Dag {
        let children = (0..=len)
            .map(|i| {
                if i < len {
                    vec![(i + 1) as u32]
                } else {
                    vec![]
                }
            })
            .collect();
        Dag::new(children, vec![0])
    }

    #[test]
    fn distances_respect_limit() {
        let c = chain(3);
        assert_eq!(c.distances(&[0], 2), vec![0, 1, 2, UNREACHED]);
    }

    #[test]
    fn restrict_chain() {
        let (r, map) = chain(2).restrict(1, &[0]);
        assert_eq!(r, Dag::new(vec![vec![1], vec![]], vec![0]));
        assert_eq!(map, vec![0, 1]);
    }

    #[test]
    fn tcl_membership() {
        assert!(chain(1).is_tcl(1, 1));
        assert!(!chain(2).is_tcl(1, 1));
        assert!(!Dag::new(vec![vec![0]], vec![0]).is_tcl(1, 1));
        // two equal empty nodes in U
        assert!(!Dag::new(vec![vec![], vec![]], vec![0, 1]).is_tcl(0, 1));
        assert!(Dag::empty().is_tcl(3, 5));
    }
}
