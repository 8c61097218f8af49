//! Characteristic and defining formulas of structures, and quantifier
//! elimination down to Boolean combinations of bounded existential formulas.

use std::collections::BTreeSet;

use super::{sksat, Algorithm, DecideError, Options};
use crate::formula::{fresh_name, Formula, Var};
use crate::limits::Limits;
use crate::structure::{embeds, enumerate, TclStructure};

// Balanced so that long diagrams do not produce deep trees.
fn fold_balanced(
    mut items: Vec<Formula>,
    op: fn(Formula, Formula) -> Formula,
    unit: bool,
) -> Formula {
    if items.is_empty() {
        return Formula::Const(unit);
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => op(a, b),
                None => a,
            });
        }
        items = next;
    }
    items.pop().unwrap()
}

fn conj(items: Vec<Formula>) -> Formula {
    fold_balanced(items, Formula::and, true)
}

fn disj(items: Vec<Formula>) -> Formula {
    fold_balanced(items, Formula::or, false)
}

/// The bounded existential diagram `ψ(x̄)` of `s`: true of `(B, b̄)` iff `s`
/// embeds into the closure of `b̄` at the level `s` was built for. `vars[i]`
/// names tuple position `i`; the remaining nodes get fresh names.
pub fn characteristic_formula(s: &TclStructure, vars: &[Var]) -> Formula {
    let dag = s.dag();
    assert_eq!(
        vars.len(),
        dag.tuple().len(),
        "one variable per tuple position"
    );
    let l = vars.len();
    // slot i holds node nodes[i]; parent[i] is the slot it is bound under
    let mut nodes: Vec<u32> = dag.tuple().to_vec();
    let mut names: Vec<Var> = vars.to_vec();
    let mut parent: Vec<usize> = vec![usize::MAX; l];
    let mut seen = vec![false; dag.len()];
    for &t in dag.tuple() {
        seen[t as usize] = true;
    }
    let mut used: BTreeSet<Var> = vars.iter().cloned().collect();
    let mut i = 0;
    while i < nodes.len() {
        for &c in dag.children(nodes[i]) {
            if !seen[c as usize] {
                seen[c as usize] = true;
                let name = fresh_name(&format!("x{}", nodes.len()), &used);
                used.insert(name.clone());
                nodes.push(c);
                names.push(name);
                parent.push(i);
            }
        }
        i += 1;
    }
    let r = nodes.len();
    let mut diagram = Vec::new();
    for a in 0..r {
        for b in 0..r {
            let atom = Formula::mem(names[a].clone(), names[b].clone());
            diagram.push(if dag.has_edge(nodes[b], nodes[a]) {
                atom
            } else {
                Formula::not(atom)
            });
        }
    }
    for a in 0..r {
        for b in a + 1..r {
            let atom = Formula::eq(names[a].clone(), names[b].clone());
            diagram.push(if nodes[a] == nodes[b] {
                atom
            } else {
                Formula::not(atom)
            });
        }
    }
    let mut f = conj(diagram);
    for j in (l..r).rev() {
        f = Formula::bounded_exists(names[j].clone(), names[parent[j]].clone(), f);
    }
    f
}

/// `ψ(s) ∧ ¬⋁ ψ(M)` over the classes `M` at `(k, n)` that do not embed into
/// `s`. Defines the `∼_n`-class of `s`.
pub fn defining_formula(
    s: &TclStructure,
    k: usize,
    n: u64,
    vars: &[Var],
    limits: &Limits,
) -> Result<Formula, DecideError> {
    let psi = characteristic_formula(s, vars);
    let negative: Vec<Formula> = enumerate(k, n, vars.len(), limits)?
        .iter()
        .filter(|m| !embeds(m, s))
        .map(|m| characteristic_formula(m, vars))
        .collect();
    if negative.is_empty() {
        return Ok(psi);
    }
    Ok(Formula::and(psi, Formula::not(disj(negative))))
}

/// An equivalent (in `S_k`) Boolean combination of bounded existential
/// formulas, in the same free variables.
pub fn quantifier_eliminate(
    k: usize,
    phi: &Formula,
    opts: &Options,
) -> Result<Formula, DecideError> {
    if phi.is_quantifier_free() {
        return Ok(phi.clone());
    }
    let f = phi.desugar_bounded();
    let vars = f.free_vars();
    let n = super::to_level(super::t_rank(k as u64, u64::from(f.rank())));
    let classes = enumerate(k, n, vars.len(), &opts.limits)?;
    let opts = Options {
        algorithm: Algorithm::Rank,
        ..opts.clone()
    };
    let mut disjuncts = Vec::new();
    for s in &classes {
        if sksat(s, n, &f, &vars, k, &opts)?.value {
            disjuncts.push(defining_formula(s, k, n, &vars, &opts.limits)?);
        }
    }
    Ok(disj(disjuncts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn lone_root_diagram() {
        let s = TclStructure::from_parts(&["a"], &[], &["a"]).unwrap();
        let f = characteristic_formula(&s, &[Var::new("x0")]);
        assert_eq!(f, parse("!(x0 in x0)").unwrap());
    }

    #[test]
    fn chain_diagram() {
        let s = TclStructure::from_parts(&["a", "b"], &[("a", "b")], &["a"]).unwrap();
        let f = characteristic_formula(&s, &[Var::new("x0")]);
        assert_eq!(f.quantifier_count(), 1);
        assert!(
            matches!(f, Formula::BoundedExists(ref y, ref x, _) if y.name() == "x1" && x.name() == "x0")
        );
    }

    #[test]
    fn fresh_names_avoid_the_tuple() {
        let s = TclStructure::from_parts(&["a", "b"], &[("a", "b")], &["a"]).unwrap();
        let f = characteristic_formula(&s, &[Var::new("x1")]);
        assert!(f.all_vars().len() == 2);
        assert_eq!(f.free_vars(), vec![Var::new("x1")]);
    }

    #[test]
    fn negative_list_for_the_root() {
        let s = TclStructure::from_parts(&["a"], &[], &["a"]).unwrap();
        let f = defining_formula(&s, 1, 1, &[Var::new("x0")], &Limits::default()).unwrap();
        let expected = Formula::and(
            characteristic_formula(&s, &[Var::new("x0")]),
            Formula::not(characteristic_formula(
                &TclStructure::from_parts(&["a", "b"], &[("a", "b")], &["a"]).unwrap(),
                &[Var::new("x0")],
            )),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn elimination_picks_the_empty_set() {
        let phi = parse("forall t. !(t in x)").unwrap();
        let out = quantifier_eliminate(1, &phi, &Options::default()).unwrap();
        let root = TclStructure::from_parts(&["a"], &[], &["a"]).unwrap();
        let expected = defining_formula(&root, 1, 3, &[Var::new("x")], &Limits::default()).unwrap();
        assert_eq!(out, expected);
        assert!(out.is_bounded());
    }

    #[test]
    fn quantifier_free_is_unchanged() {
        let phi = parse("x in y | x = y").unwrap();
        assert_eq!(
            quantifier_eliminate(2, &phi, &Options::default()).unwrap(),
            phi
        );
    }
}
