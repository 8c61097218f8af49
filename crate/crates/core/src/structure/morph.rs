use super::canon::canonical_key;
use super::dag::{Dag, UNREACHED};

pub(crate) fn isomorphic(a: &Dag, b: &Dag) -> bool {
    a.len() == b.len()
        && a.tuple.len() == b.tuple.len()
        && a.edge_count() == b.edge_count()
        && canonical_key(a, None) == canonical_key(b, None)
}

/// Injective map sending tuple to tuple position-wise that preserves and
/// reflects edges.
pub(crate) fn embeds(a: &Dag, b: &Dag) -> bool {
    if a.tuple.len() != b.tuple.len() || a.len() > b.len() {
        return false;
    }
    let mut map = vec![UNREACHED; a.len()];
    let mut used = vec![false; b.len()];
    for (&x, &y) in a.tuple.iter().zip(&b.tuple) {
        let current = map[x as usize];
        if current == UNREACHED {
            if used[y as usize] {
                return false;
            }
            map[x as usize] = y;
            used[y as usize] = true;
        } else if current != y {
            return false;
        }
    }
    let fixed: Vec<u32> = (0..a.len() as u32)
        .filter(|&u| map[u as usize] != UNREACHED)
        .collect();
    for &u in &fixed {
        for &v in &fixed {
            if a.has_edge(u, v) != b.has_edge(map[u as usize], map[v as usize]) {
                return false;
            }
        }
    }
    let free: Vec<u32> = (0..a.len() as u32)
        .filter(|&u| map[u as usize] == UNREACHED)
        .collect();
    extend(a, b, &free, &mut map, &mut used)
}

fn extend(a: &Dag, b: &Dag, free: &[u32], map: &mut [u32], used: &mut [bool]) -> bool {
    let Some((&u, rest)) = free.split_first() else {
        return true;
    };
    for y in 0..b.len() as u32 {
        if used[y as usize] || a.children[u as usize].len() > b.children[y as usize].len() {
            continue;
        }
        let consistent = (0..a.len() as u32).all(|v| {
            let w = map[v as usize];
            w == UNREACHED
                || (a.has_edge(u, v) == b.has_edge(y, w) && a.has_edge(v, u) == b.has_edge(w, y))
        }) && a.has_edge(u, u) == b.has_edge(y, y);
        if !consistent {
            continue;
        }
        map[u as usize] = y;
        used[y as usize] = true;
        if extend(a, b, rest, map, used) {
            return true;
        }
        map[u as usize] = UNREACHED;
        used[y as usize] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_examples() {
        let root = Dag::new(vec![vec![]], vec![0]);
        let chain1 = Dag::new(vec![vec![1], vec![]], vec![0]);
        let chain2 = Dag::new(vec![vec![1], vec![2], vec![]], vec![0]);
        assert!(embeds(&root, &chain1));
        assert!(!embeds(&chain2, &chain1));
        assert!(embeds(&chain1, &chain2));
        assert!(embeds(&chain2, &chain2));
        // reflecting edges: a pair without an edge cannot land on an edge
        let pair = Dag::new(vec![vec![], vec![]], vec![0, 1]);
        let linked = Dag::new(vec![vec![1], vec![]], vec![0, 1]);
        assert!(!embeds(&pair, &linked));
    }

    #[test]
    fn isomorphism_examples() {
        let fork_a = Dag::new(vec![vec![1, 2], vec![], vec![]], vec![0]);
        let fork_b = Dag::new(vec![vec![], vec![], vec![0, 1]], vec![2]);
        assert!(isomorphic(&fork_a, &fork_b));
        let chain1 = Dag::new(vec![vec![1], vec![]], vec![0]);
        let chain2 = Dag::new(vec![vec![1], vec![2], vec![]], vec![0]);
        assert!(!isomorphic(&chain1, &chain2));
    }
}
