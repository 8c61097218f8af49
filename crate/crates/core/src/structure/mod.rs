//! Finite structures `⟨T, ∈, ā⟩`: validation, restriction, canonical forms,
//! morphisms, compatibility, and enumeration.

mod canon;
mod dag;
mod generate;
mod morph;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canon::CanonicalKey;
pub use dag::Dag;
pub(crate) use dag::UNREACHED;
pub(crate) use generate::{generate, Dedup, Extension};

use crate::limits::{LimitError, Limits};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("invalid structure file: {0}")]
    Json(String),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// A finite graph with named nodes and a distinguished tuple. An edge
/// `(u, v)` means `v ∈ u`.
#[derive(Clone, PartialEq, Eq)]
pub struct TclStructure {
    names: Vec<String>,
    dag: Dag,
}

#[derive(Serialize, Deserialize)]
struct StructureFile {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
    tuple: Vec<String>,
}

impl TclStructure {
    /// Builds a structure from node names, edges `(u, v)` meaning `v ∈ u`,
    /// and the tuple.
    pub fn from_parts<S: AsRef<str>>(
        nodes: &[S],
        edges: &[(S, S)],
        tuple: &[S],
    ) -> Result<Self, StructureError> {
        let mut index: HashMap<&str, u32> = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.as_ref(), i as u32).is_some() {
                return Err(StructureError::Malformed(format!(
                    "duplicate node `{}`",
                    n.as_ref()
                )));
            }
        }
        let lookup = |n: &S, what: &str| {
            index.get(n.as_ref()).copied().ok_or_else(|| {
                StructureError::Malformed(format!("{what} refers to unknown node `{}`", n.as_ref()))
            })
        };
        let mut children = vec![Vec::new(); nodes.len()];
        for (u, v) in edges {
            let (u, v) = (lookup(u, "edge")?, lookup(v, "edge")?);
            children[u as usize].push(v);
        }
        let tuple = tuple
            .iter()
            .map(|t| lookup(t, "tuple"))
            .collect::<Result<_, _>>()?;
        Ok(TclStructure {
            names: nodes.iter().map(|n| n.as_ref().to_string()).collect(),
            dag: Dag::new(children, tuple),
        })
    }

    /// Wraps a graph, naming node `i` as `n{i}`.
    pub fn from_dag(dag: Dag) -> Self {
        let names = (0..dag.len()).map(|i| format!("n{i}")).collect();
        TclStructure { names, dag }
    }

    pub(crate) fn from_named(names: Vec<String>, dag: Dag) -> Self {
        debug_assert_eq!(names.len(), dag.len());
        TclStructure { names, dag }
    }

    pub fn empty() -> Self {
        TclStructure::from_dag(Dag::empty())
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn len(&self) -> usize {
        self.dag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dag.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tuple_len(&self) -> usize {
        self.dag.tuple.len()
    }

    pub fn tuple_names(&self) -> Vec<&str> {
        self.dag
            .tuple
            .iter()
            .map(|&t| self.names[t as usize].as_str())
            .collect()
    }

    /// Edges as name pairs `(u, v)` meaning `v ∈ u`, in node order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        self.dag
            .children
            .iter()
            .enumerate()
            .flat_map(|(u, cs)| cs.iter().map(move |&v| (u, v as usize)))
            .map(|(u, v)| (self.names[u].as_str(), self.names[v].as_str()))
            .collect()
    }

    /// Membership in the class of `tcl^k_m(l)`-structures.
    pub fn validate(&self, k: usize, m: u64) -> bool {
        self.dag.is_tcl(k, m)
    }

    /// Induced substructure on the nodes within `m_sub` steps of the
    /// selected tuple positions, with the selected tuple.
    pub fn restrict(&self, m_sub: u64, indices: &[usize]) -> TclStructure {
        let (dag, keep) = self.dag.restrict(m_sub, indices);
        let names = keep
            .iter()
            .map(|&u| self.names[u as usize].clone())
            .collect();
        TclStructure { names, dag }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canon::canonical_key(&self.dag, None)
    }

    /// Canonical relabeling (nodes named `n{i}`) together with its key.
    pub fn canonicalize(&self) -> (TclStructure, CanonicalKey) {
        let (dag, key) = canon::canonical_dag(&self.dag);
        (TclStructure::from_dag(dag), key)
    }

    pub fn to_json(&self) -> String {
        let file = StructureFile {
            nodes: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(u, v)| (u.to_string(), v.to_string()))
                .collect(),
            tuple: self.tuple_names().into_iter().map(String::from).collect(),
        };
        serde_json::to_string(&file).expect("structure serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let file: StructureFile =
            serde_json::from_str(text).map_err(|e| StructureError::Json(e.to_string()))?;
        TclStructure::from_parts(&file.nodes, &file.edges, &file.tuple)
    }
}

impl fmt::Debug for TclStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl fmt::Display for TclStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl FromStr for TclStructure {
    type Err = StructureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TclStructure::from_json(s)
    }
}

pub fn isomorphic(a: &TclStructure, b: &TclStructure) -> bool {
    morph::isomorphic(&a.dag, &b.dag)
}

/// Whether `a` embeds into `b`: an injective map preserving and reflecting
/// edges that sends tuple to tuple position-wise.
pub fn embeds(a: &TclStructure, b: &TclStructure) -> bool {
    morph::embeds(&a.dag, &b.dag)
}

/// Literal compatibility of `s1` at level `m` and `s2` at level `m2`:
/// the union over shared node names must be a joint structure whose
/// restrictions give back `s1` and `s2` exactly.
pub fn compatible(s1: &TclStructure, k: usize, m: u64, s2: &TclStructure, m2: u64) -> bool {
    let mut names: BTreeSet<&str> = s1.names.iter().map(String::as_str).collect();
    names.extend(s2.names.iter().map(String::as_str));
    let names: Vec<&str> = names.into_iter().collect();
    let mut edges: BTreeSet<(&str, &str)> = s1.edges().into_iter().collect();
    edges.extend(s2.edges());
    let edges: Vec<(&str, &str)> = edges.into_iter().collect();
    let mut tuple = s1.tuple_names();
    tuple.extend(s2.tuple_names());
    let Ok(w) = TclStructure::from_parts(&names, &edges, &tuple) else {
        return false;
    };
    let l1 = s1.tuple_len();
    let first: Vec<usize> = (0..l1).collect();
    let second: Vec<usize> = (l1..tuple.len()).collect();
    let d1 = w.dag.distances(&w.dag.tuple[..l1], m);
    let d2 = w.dag.distances(&w.dag.tuple[l1..], m2);
    if w.dag.max_out_degree() > k || !w.dag.is_acyclic() {
        return false;
    }
    if (0..w.len()).any(|u| d1[u] == UNREACHED && d2[u] == UNREACHED) {
        return false;
    }
    let in_u = |u: u32| {
        let u = u as usize;
        (d1[u] != UNREACHED && u64::from(d1[u]) < m)
            || (d2[u] != UNREACHED && u64::from(d2[u]) < m2)
            || w.dag.children[u].len() == k
    };
    if !w.dag.extensional_on(in_u) {
        return false;
    }
    same_named(&w.restrict(m, &first), s1) && same_named(&w.restrict(m2, &second), s2)
}

fn same_named(a: &TclStructure, b: &TclStructure) -> bool {
    let nodes = |s: &TclStructure| s.names.iter().cloned().collect::<BTreeSet<_>>();
    let edges = |s: &TclStructure| {
        s.edges()
            .into_iter()
            .map(|(u, v)| (u.to_string(), v.to_string()))
            .collect::<BTreeSet<_>>()
    };
    nodes(a) == nodes(b) && edges(a) == edges(b) && a.tuple_names() == b.tuple_names()
}

pub(crate) fn canonical(dag: &Dag) -> (Dag, CanonicalKey) {
    canon::canonical_dag(dag)
}

/// One canonical representative per isomorphism class of
/// `tcl^k_m(l)`-structures, in key order.
pub fn enumerate(
    k: usize,
    m: u64,
    l: usize,
    limits: &Limits,
) -> Result<Vec<TclStructure>, StructureError> {
    let m = level(k, m, l, limits)?;
    Ok(generate::enumerate_dags(k, m, l, limits)?
        .into_iter()
        .map(|(d, _)| TclStructure::from_dag(d))
        .collect())
}

/// Every way, up to isomorphism fixing `s` pointwise, of extending the tuple
/// of `s` (a structure at level `m`) by `p` entries to a compatible structure
/// at level `m2`. Fresh nodes are named `_f{i}`.
pub fn extensions(
    s: &TclStructure,
    k: usize,
    m: u64,
    p: usize,
    m2: u64,
    limits: &Limits,
) -> Result<Vec<TclStructure>, StructureError> {
    let m2 = level(k, m2, s.tuple_len() + p, limits)?;
    let exts = generate(&s.dag, k, m, p, m2, Dedup::FixBase, limits)?;
    let base = s.len() as u32;
    let mut used: BTreeSet<String> = s.names.iter().cloned().collect();
    let mut fresh_names: BTreeMap<u32, String> = BTreeMap::new();
    let mut name_of = |w: u32| -> String {
        if w < base {
            return s.names[w as usize].clone();
        }
        fresh_names
            .entry(w)
            .or_insert_with(|| {
                let mut i = w - base;
                loop {
                    let candidate = format!("_f{i}");
                    if used.insert(candidate.clone()) {
                        break candidate;
                    }
                    i += 1;
                }
            })
            .clone()
    };
    Ok(exts
        .into_iter()
        .map(|e| {
            let names = e.origin.iter().map(|&w| name_of(w)).collect();
            TclStructure::from_named(names, e.dag)
        })
        .collect())
}

/// Refuses levels whose node bound `l·k^{≤m}` exceeds the cap.
pub(crate) fn level(k: usize, m: u64, l: usize, limits: &Limits) -> Result<u32, LimitError> {
    let bound = node_bound(k as u64, m, l as u64);
    match bound {
        Some(b) if b <= limits.max_nodes => Ok(m.min(u64::from(u32::MAX - 1)) as u32),
        _ => Err(LimitError::NodeCap {
            bound: bound.map_or_else(|| "overflow".to_string(), |b| b.to_string()),
            cap: limits.max_nodes,
        }),
    }
}

/// `l·k^{≤m}`, or `None` on overflow.
pub(crate) fn node_bound(k: u64, m: u64, l: u64) -> Option<u64> {
    if l == 0 {
        return Some(0);
    }
    let geometric = match k {
        0 => 1,
        1 => m.checked_add(1)?,
        _ => {
            let mut sum: u64 = 0;
            let mut term: u64 = 1;
            for i in 0..=m {
                sum = sum.checked_add(term)?;
                if i < m {
                    term = term.checked_mul(k)?;
                }
            }
            sum
        }
    };
    l.checked_mul(geometric)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(nodes: &[&str], edges: &[(&str, &str)], tuple: &[&str]) -> TclStructure {
        TclStructure::from_parts(nodes, edges, tuple).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(s(&["a"], &[], &["a"]).validate(1, 1));
        assert!(!s(&["a"], &[("a", "a")], &["a"]).validate(1, 1));
        assert!(!s(&["a", "b"], &[], &["a", "b"]).validate(0, 1));
        assert!(TclStructure::empty().validate(0, 0));
    }

    #[test]
    fn malformed_is_an_error() {
        assert!(TclStructure::from_parts(&["a"], &[("a", "b")], &["a"]).is_err());
        assert!(TclStructure::from_parts(&["a"], &[], &["z"]).is_err());
        assert!(TclStructure::from_parts(&["a", "a"], &[], &["a"]).is_err());
        assert!(TclStructure::from_json("{\"nodes\":[]}").is_err());
    }

    #[test]
    fn restrict_examples() {
        let chain = s(&["a", "b", "c"], &[("a", "b"), ("b", "c")], &["a"]);
        assert_eq!(
            chain.restrict(1, &[0]),
            s(&["a", "b"], &[("a", "b")], &["a"])
        );
        assert_eq!(chain.restrict(0, &[0]), s(&["a"], &[], &["a"]));
        assert_eq!(chain.restrict(2, &[0]), chain);
    }

    #[test]
    fn compatibility_examples() {
        let c = s(&["c"], &[], &["c"]);
        assert!(compatible(&TclStructure::empty(), 1, 0, &c, 0));
        let s1 = s(&["a", "b"], &[("a", "b")], &["a"]);
        let s2 = s(&["a", "c"], &[("a", "c")], &["a", "c"]);
        assert!(!compatible(&s1, 2, 1, &s2, 0));
        let s3 = s(&["a", "c"], &[("c", "a")], &["a", "c"]);
        assert!(compatible(&s1, 1, 1, &s3, 0));
    }

    #[test]
    fn extensions_are_compatible() {
        let root = s(&["a"], &[], &["a"]);
        let exts = extensions(&root, 1, 3, 1, 0, &Limits::default()).unwrap();
        assert_eq!(exts.len(), 3);
        for e in &exts {
            assert!(e.validate(1, 0));
            assert!(compatible(&root, 1, 3, e, 0), "{e}");
        }
    }

    #[test]
    fn json_round_trip() {
        let chain = s(&["a", "b"], &[("a", "b")], &["a", "a"]);
        assert_eq!(TclStructure::from_json(&chain.to_json()).unwrap(), chain);
    }

    #[test]
    fn node_bounds() {
        assert_eq!(node_bound(2, 4, 1), Some(31));
        assert_eq!(node_bound(0, 9, 3), Some(3));
        assert_eq!(node_bound(1, 5, 2), Some(12));
        assert_eq!(node_bound(2, 80, 1), None);
    }
}
