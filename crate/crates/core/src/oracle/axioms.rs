//! The axioms of `S_k` and the foundation sentence, as text, with a
//! feasibility tag for exact-bound decision.

use serde::Serialize;

use crate::decide::t_block;
use crate::formula::{parse, prenex, Formula};
use crate::limits::DEFAULT_MAX_NODES;
use crate::structure::node_bound;

#[derive(Clone, Debug, Serialize)]
pub struct Axiom {
    pub name: String,
    pub text: String,
    /// Every block extension of the sentence and of its negation stays
    /// under [`desk_node_cap`].
    pub feasible: bool,
}

impl Axiom {
    pub fn formula(&self) -> Formula {
        parse(&self.text).expect("axiom text parses")
    }
}

fn vars(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn join_or(items: &[String], empty: &str, sep: &str) -> String {
    if items.is_empty() {
        empty.to_string()
    } else {
        format!("({})", items.join(sep))
    }
}

pub fn v_n(n: usize) -> String {
    let xs = vars("x", n);
    let eqs: Vec<String> = xs.iter().map(|x| format!("t = {x}")).collect();
    let body = format!(
        "exists y. forall t. (t in y <-> {})",
        join_or(&eqs, "false", " | ")
    );
    if n == 0 {
        body
    } else {
        format!("forall {}. {body}", xs.join(", "))
    }
}

pub fn extensionality() -> String {
    "forall x, y. ((forall t. (t in x <-> t in y)) -> x = y)".to_string()
}

pub fn b_k(k: usize) -> String {
    let us = vars("u", k + 1);
    let mems: Vec<String> = us.iter().map(|u| format!("{u} in x")).collect();
    let mut eqs = Vec::new();
    for i in 0..=k {
        for j in i + 1..=k {
            eqs.push(format!("{} = {}", us[i], us[j]));
        }
    }
    format!(
        "forall x, {}. ({} -> {})",
        us.join(", "),
        join_or(&mems, "true", " & "),
        join_or(&eqs, "false", " | ")
    )
}

/// No `∈`-cycle of length `n`.
pub fn c_n(n: usize) -> String {
    let xs = vars("x", n + 1);
    let mut parts: Vec<String> = (0..n)
        .map(|i| format!("{} in {}", xs[i], xs[i + 1]))
        .collect();
    parts.push(format!("{} = x0", xs[n]));
    format!("forall {}. !({})", xs.join(", "), parts.join(" & "))
}

/// Foundation with `x ≠ ∅` spelled as `∃w w∈x`.
pub fn foundation() -> String {
    "forall x. ((exists w. w in x) -> exists y. (y in x & forall z. !(z in x & z in y)))"
        .to_string()
}

/// "There are at least `n` distinct sets."
pub fn at_least(n: usize) -> String {
    let xs = vars("x", n);
    let mut neqs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            neqs.push(format!("!({} = {})", xs[i], xs[j]));
        }
    }
    format!(
        "exists {}. {}",
        xs.join(", "),
        join_or(&neqs, "true", " & ")
    )
}

/// Whether the block-wise algorithm stays within `max_nodes` on `f`.
pub fn block_feasible(k: usize, f: &Formula, max_nodes: u64) -> bool {
    let p = prenex(f);
    let blocks = p.blocks();
    let mut width = 0u64;
    for (i, b) in blocks.iter().enumerate() {
        width += b.vars.len() as u64;
        let q = blocks[i..].iter().map(|b| b.vars.len()).max().unwrap_or(0) as u64;
        let rest = (blocks.len() - i - 1) as u64;
        let level = match t_block(k as u64, rest, q)
            .ok()
            .and_then(|t| u64::try_from(t).ok())
        {
            Some(level) => level,
            None => return false,
        };
        if node_bound(k as u64, level, width).is_none_or(|n| n > max_nodes) {
            return false;
        }
    }
    true
}

/// Node bound up to which block extensions finish quickly. Class counts grow
/// polynomially in the level for `k ≤ 1` but doubly exponentially for
/// `k ≥ 2`, where one tuple entry at level 3 already has over `5·10^5`
/// classes.
pub fn desk_node_cap(k: usize) -> u64 {
    if k <= 1 {
        DEFAULT_MAX_NODES
    } else {
        7
    }
}

fn tagged(k: usize, name: String, text: String) -> Axiom {
    let f = parse(&text).expect("axiom text parses");
    let cap = desk_node_cap(k);
    let feasible = block_feasible(k, &f, cap) && block_feasible(k, &Formula::not(f), cap);
    Axiom {
        name,
        text,
        feasible,
    }
}

/// `V_0, V_k, E, B_k, C_1..C_4` and foundation.
pub fn axiom_suite(k: usize) -> Vec<Axiom> {
    let mut out = vec![
        tagged(k, "V_0".into(), v_n(0)),
        tagged(k, format!("V_{k}"), v_n(k)),
        tagged(k, "E".into(), extensionality()),
        tagged(k, format!("B_{k}"), b_k(k)),
    ];
    for n in 1..=4 {
        out.push(tagged(k, format!("C_{n}"), c_n(n)));
    }
    out.push(tagged(k, "foundation".into(), foundation()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feasible(k: usize) -> Vec<String> {
        axiom_suite(k)
            .into_iter()
            .filter(|a| a.feasible)
            .map(|a| a.name)
            .collect()
    }

    #[test]
    fn texts_parse() {
        for k in 0..4 {
            for a in axiom_suite(k) {
                assert!(a.formula().is_sentence(), "{}", a.text);
            }
        }
        assert_eq!(c_n(1), "forall x0, x1. !(x0 in x1 & x1 = x0)");
    }

    #[test]
    fn feasibility_tags() {
        assert_eq!(feasible(0).len(), 9);
        assert_eq!(feasible(1).len(), 9);
        assert_eq!(feasible(2), vec!["B_2", "C_1", "C_2", "C_3", "C_4"]);
    }
}
