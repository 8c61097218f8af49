//! Concrete tuples whose closure is a given structure.
//!
//! Nodes within the level or with `k` children are determined by their
//! children. The remaining nodes sit on the boundary and get extra elements
//! outside the structure where needed to keep all values distinct.

use std::collections::HashSet;

use itertools::Itertools;
use thiserror::Error;

use super::{tcl_structure, HSet};
use crate::structure::{isomorphic, TclStructure, UNREACHED};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("not a tcl^{k}_{m} structure")]
    Invalid { k: usize, m: u64 },
    #[error("no completion found")]
    NoCompletion,
}

fn children_first(s: &TclStructure) -> Vec<u32> {
    let dag = s.dag();
    let n = dag.len();
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    for root in 0..n as u32 {
        if done[root as usize] {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        done[root as usize] = true;
        while let Some((u, i)) = stack.pop() {
            match dag.children(u).get(i) {
                Some(&c) => {
                    stack.push((u, i + 1));
                    if !done[c as usize] {
                        done[c as usize] = true;
                        stack.push((c, 0));
                    }
                }
                None => order.push(u),
            }
        }
    }
    order
}

struct Plan {
    order: Vec<u32>,
    opaque: Vec<bool>,
}

/// Least completion first: boundary nodes take the first candidate (in
/// padding order) that collides with nothing assigned so far.
fn greedy(s: &TclStructure, k: usize, plan: &Plan) -> Option<Vec<HSet>> {
    let dag = s.dag();
    let padding: Vec<HSet> = (0..dag.len() + k + 2).map(HSet::tower).collect();
    let mut values: Vec<Option<HSet>> = vec![None; dag.len()];
    let mut assigned: HashSet<HSet> = HashSet::new();
    let mut extras: HashSet<HSet> = HashSet::new();
    for &u in &plan.order {
        let base: Vec<HSet> = dag
            .children(u)
            .iter()
            .map(|&c| values[c as usize].clone().unwrap())
            .collect();
        let value = if plan.opaque[u as usize] {
            let free: Vec<&HSet> = padding.iter().filter(|p| !assigned.contains(*p)).collect();
            let mut found = None;
            'search: for e in 0..=k - base.len() {
                for pick in free.iter().combinations(e) {
                    let mut members = base.clone();
                    members.extend(pick.iter().map(|p| (**p).clone()));
                    let v = HSet::from_children(members);
                    if !assigned.contains(&v) && !extras.contains(&v) {
                        extras.extend(pick.into_iter().map(|p| (*p).clone()));
                        found = Some(v);
                        break 'search;
                    }
                }
            }
            found?
        } else {
            let v = HSet::from_children(base);
            if assigned.contains(&v) || extras.contains(&v) {
                return None;
            }
            v
        };
        assigned.insert(value.clone());
        values[u as usize] = Some(value);
    }
    Some(values.into_iter().map(Option::unwrap).collect())
}

/// Every boundary node gets its own tall tower, spaced so that no chain of
/// singletons built inside the structure can reach the next one.
fn spaced(s: &TclStructure, plan: &Plan) -> Vec<HSet> {
    let dag = s.dag();
    let spacing = dag.len() + 2;
    let mut values: Vec<Option<HSet>> = vec![None; dag.len()];
    let mut j = 0;
    for &u in &plan.order {
        let mut members: Vec<HSet> = dag
            .children(u)
            .iter()
            .map(|&c| values[c as usize].clone().unwrap())
            .collect();
        if plan.opaque[u as usize] {
            j += 1;
            members.push(HSet::tower(spacing * j));
        }
        values[u as usize] = Some(HSet::from_children(members));
    }
    values.into_iter().map(Option::unwrap).collect()
}

/// Sets `ā` in `H_k` whose level-`m` closure is isomorphic to `s`, tuple to
/// tuple.
pub fn realize(s: &TclStructure, k: usize, m: u64) -> Result<Vec<HSet>, RealizeError> {
    if !s.validate(k, m) {
        return Err(RealizeError::Invalid { k, m });
    }
    let dag = s.dag();
    let dist = dag.distances(dag.tuple(), m);
    let opaque = (0..dag.len() as u32)
        .map(|u| {
            let d = dist[u as usize];
            d != UNREACHED && u64::from(d) == m && dag.children(u).len() < k
        })
        .collect();
    let plan = Plan {
        order: children_first(s),
        opaque,
    };
    let check = |values: &[HSet]| {
        let tuple: Vec<HSet> = dag
            .tuple()
            .iter()
            .map(|&t| values[t as usize].clone())
            .collect();
        isomorphic(&tcl_structure(&tuple, m), s).then_some(tuple)
    };
    if let Some(tuple) = greedy(s, k, &plan).as_deref().and_then(check) {
        return Ok(tuple);
    }
    check(&spaced(s, &plan)).ok_or(RealizeError::NoCompletion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hset::{check_k, parse_set};

    fn realize_one(s: &TclStructure, k: usize, m: u64) -> HSet {
        let t = realize(s, k, m).unwrap();
        assert!(t.iter().all(|x| check_k(x, k)));
        t[0].clone()
    }

    #[test]
    fn minimal_completions() {
        let root = TclStructure::from_parts(&["a"], &[], &["a"]).unwrap();
        assert_eq!(realize_one(&root, 1, 1), HSet::empty());
        let chain = TclStructure::from_parts(&["a", "b"], &[("a", "b")], &["a"]).unwrap();
        assert_eq!(realize_one(&chain, 1, 1), parse_set("{{}}").unwrap());
        let fork =
            TclStructure::from_parts(&["a", "b", "c"], &[("a", "b"), ("a", "c")], &["a"]).unwrap();
        assert_eq!(realize_one(&fork, 2, 1), parse_set("{{},{{{}}}}").unwrap());
    }

    #[test]
    fn rejects_invalid() {
        let fork =
            TclStructure::from_parts(&["a", "b", "c"], &[("a", "b"), ("a", "c")], &["a"]).unwrap();
        assert!(matches!(
            realize(&fork, 1, 1),
            Err(RealizeError::Invalid { .. })
        ));
    }

    #[test]
    fn spaced_towers_separate_boundary_nodes() {
        // two boundary leaves plus a determined leaf: greedy gives ∅ to a
        // boundary leaf first, then the interior leaf needs ∅ too
        let s = TclStructure::from_parts(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d")],
            &["a"],
        )
        .unwrap();
        let t = realize(&s, 2, 2).unwrap();
        assert!(isomorphic(&tcl_structure(&t, 2), &s));
    }
}
