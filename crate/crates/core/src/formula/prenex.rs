use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{fresh_name, Formula, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// A maximal run of same-kind quantifiers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub kind: Quantifier,
    pub vars: Vec<Var>,
}

/// Quantifier prefix split into alternating blocks, plus a quantifier-free
/// matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrenexFormula {
    blocks: Vec<Block>,
    matrix: Formula,
}

impl PrenexFormula {
    /// Builds a prenex formula, merging adjacent blocks of the same kind and
    /// dropping empty ones. The matrix must be quantifier-free.
    pub fn new(blocks: Vec<Block>, matrix: Formula) -> Self {
        assert!(
            matrix.is_quantifier_free(),
            "prenex matrix must be quantifier-free"
        );
        let mut merged: Vec<Block> = Vec::new();
        for b in blocks.into_iter().filter(|b| !b.vars.is_empty()) {
            match merged.last_mut() {
                Some(last) if last.kind == b.kind => last.vars.extend(b.vars),
                _ => merged.push(b),
            }
        }
        PrenexFormula {
            blocks: merged,
            matrix,
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn matrix(&self) -> &Formula {
        &self.matrix
    }

    /// `(r, q)`: number of blocks and the longest block length.
    pub fn alternation_profile(&self) -> (usize, usize) {
        let q = self.blocks.iter().map(|b| b.vars.len()).max().unwrap_or(0);
        (self.blocks.len(), q)
    }

    pub fn quantifier_count(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.len()).sum()
    }

    pub fn as_formula(&self) -> Formula {
        self.blocks
            .iter()
            .rev()
            .fold(self.matrix.clone(), |acc, b| {
                b.vars.iter().rev().fold(acc, |acc, v| match b.kind {
                    Quantifier::Exists => Formula::exists(v.clone(), acc),
                    Quantifier::Forall => Formula::forall(v.clone(), acc),
                })
            })
    }
}

impl fmt::Display for PrenexFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_formula())
    }
}

/// Converts a formula to prenex form.
///
/// Bounded quantifiers are expanded first, dummy quantifiers are removed,
/// `↔` between quantified operands is split into two implications, bound
/// variables are renamed apart, and quantifiers are pulled out left to right.
pub fn prenex(f: &Formula) -> PrenexFormula {
    let f = drop_dummies(&f.desugar_bounded());
    let f = expand_quantified_iff(&f);
    let mut used: BTreeSet<Var> = f.free_vars().into_iter().collect();
    let f = rename_apart(&f, &mut used, &mut HashMap::new());
    let (prefix, matrix) = pull(&f);
    let blocks = prefix
        .into_iter()
        .map(|(kind, v)| Block {
            kind,
            vars: vec![v],
        })
        .collect();
    PrenexFormula::new(blocks, matrix)
}

/// Removes quantifiers whose variable does not occur free in the body.
pub(crate) fn drop_dummies(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Atom(..) | Const(_) => f.clone(),
        Not(g) => Formula::not(drop_dummies(g)),
        And(a, b) => Formula::and(drop_dummies(a), drop_dummies(b)),
        Or(a, b) => Formula::or(drop_dummies(a), drop_dummies(b)),
        Implies(a, b) => Formula::implies(drop_dummies(a), drop_dummies(b)),
        Iff(a, b) => Formula::iff(drop_dummies(a), drop_dummies(b)),
        Exists(x, g) | Forall(x, g) => {
            let body = drop_dummies(g);
            if !body.occurs_free(x) {
                body
            } else if matches!(f, Exists(..)) {
                Formula::exists(x.clone(), body)
            } else {
                Formula::forall(x.clone(), body)
            }
        }
        BoundedExists(y, x, g) => Formula::bounded_exists(y.clone(), x.clone(), drop_dummies(g)),
        BoundedForall(y, x, g) => Formula::bounded_forall(y.clone(), x.clone(), drop_dummies(g)),
    }
}

fn expand_quantified_iff(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Atom(..) | Const(_) => f.clone(),
        Not(g) => Formula::not(expand_quantified_iff(g)),
        And(a, b) => Formula::and(expand_quantified_iff(a), expand_quantified_iff(b)),
        Or(a, b) => Formula::or(expand_quantified_iff(a), expand_quantified_iff(b)),
        Implies(a, b) => Formula::implies(expand_quantified_iff(a), expand_quantified_iff(b)),
        Iff(a, b) => {
            let (a, b) = (expand_quantified_iff(a), expand_quantified_iff(b));
            if a.is_quantifier_free() && b.is_quantifier_free() {
                Formula::iff(a, b)
            } else {
                Formula::and(
                    Formula::implies(a.clone(), b.clone()),
                    Formula::implies(b, a),
                )
            }
        }
        Exists(x, g) => Formula::exists(x.clone(), expand_quantified_iff(g)),
        Forall(x, g) => Formula::forall(x.clone(), expand_quantified_iff(g)),
        BoundedExists(..) | BoundedForall(..) => expand_quantified_iff(&f.desugar_bounded()),
    }
}

fn rename_apart(f: &Formula, used: &mut BTreeSet<Var>, env: &mut HashMap<Var, Var>) -> Formula {
    use Formula::*;
    let look = |v: &Var, env: &HashMap<Var, Var>| env.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        Atom(rel, x, y) => Atom(*rel, look(x, env), look(y, env)),
        Const(_) => f.clone(),
        Not(g) => Formula::not(rename_apart(g, used, env)),
        And(a, b) => {
            let a = rename_apart(a, used, env);
            Formula::and(a, rename_apart(b, used, env))
        }
        Or(a, b) => {
            let a = rename_apart(a, used, env);
            Formula::or(a, rename_apart(b, used, env))
        }
        Implies(a, b) => {
            let a = rename_apart(a, used, env);
            Formula::implies(a, rename_apart(b, used, env))
        }
        Iff(a, b) => {
            let a = rename_apart(a, used, env);
            Formula::iff(a, rename_apart(b, used, env))
        }
        Exists(x, g) | Forall(x, g) => {
            let fresh = fresh_name(x.name(), used);
            used.insert(fresh.clone());
            let saved = env.insert(x.clone(), fresh.clone());
            let body = rename_apart(g, used, env);
            match saved {
                Some(old) => env.insert(x.clone(), old),
                None => env.remove(x),
            };
            if matches!(f, Exists(..)) {
                Formula::exists(fresh, body)
            } else {
                Formula::forall(fresh, body)
            }
        }
        BoundedExists(..) | BoundedForall(..) => rename_apart(&f.desugar_bounded(), used, env),
    }
}

fn flip(prefix: Vec<(Quantifier, Var)>) -> Vec<(Quantifier, Var)> {
    prefix.into_iter().map(|(q, v)| (q.dual(), v)).collect()
}

// Requires bound variables renamed apart so pulling never captures.
fn pull(f: &Formula) -> (Vec<(Quantifier, Var)>, Formula) {
    use Formula::*;
    match f {
        Atom(..) | Const(_) => (Vec::new(), f.clone()),
        Not(g) => {
            let (p, m) = pull(g);
            (flip(p), Formula::not(m))
        }
        And(a, b) | Or(a, b) | Implies(a, b) => {
            let (pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            let mut prefix = if matches!(f, Implies(..)) {
                flip(pa)
            } else {
                pa
            };
            prefix.extend(pb);
            let matrix = match f {
                And(..) => Formula::and(ma, mb),
                Or(..) => Formula::or(ma, mb),
                _ => Formula::implies(ma, mb),
            };
            (prefix, matrix)
        }
        Iff(a, b) => {
            debug_assert!(a.is_quantifier_free() && b.is_quantifier_free());
            (Vec::new(), f.clone())
        }
        Exists(x, g) | Forall(x, g) => {
            let q = if matches!(f, Exists(..)) {
                Quantifier::Exists
            } else {
                Quantifier::Forall
            };
            let (mut p, m) = pull(g);
            p.insert(0, (q, x.clone()));
            (p, m)
        }
        BoundedExists(..) | BoundedForall(..) => pull(&f.desugar_bounded()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn profile(s: &str) -> (usize, usize) {
        prenex(&parse(s).unwrap()).alternation_profile()
    }

    #[test]
    fn extensionality_prefix() {
        let p = prenex(
            &parse("forall x. forall y. ((forall t. (t in x <-> t in y)) -> x = y)").unwrap(),
        );
        assert_eq!(p.blocks().len(), 2);
        assert_eq!(p.blocks()[0].kind, Quantifier::Forall);
        assert_eq!(p.blocks()[0].vars, vec![Var::new("x"), Var::new("y")]);
        assert_eq!(p.blocks()[1].kind, Quantifier::Exists);
        assert_eq!(p.blocks()[1].vars, vec![Var::new("t")]);
        assert!(p.matrix().is_quantifier_free());
        assert_eq!(p.alternation_profile(), (2, 2));
    }

    #[test]
    fn simple_profiles() {
        assert_eq!(profile("exists x. x = x"), (1, 1));
        assert_eq!(
            profile("exists x. exists y. forall z. (x in y & z = z & y in z)"),
            (2, 2)
        );
        assert_eq!(profile("forall x, u0, u1, u2. ((u0 in x & u1 in x & u2 in x) -> (u0 = u1 | u0 = u2 | u1 = u2))"), (1, 4));
        assert_eq!(profile("exists y. forall t. !(t in y)"), (2, 1));
        assert_eq!(profile("true -> false"), (0, 0));
    }

    #[test]
    fn dummy_quantifiers_are_dropped() {
        let p = prenex(&parse("exists x. forall y. exists z. x in x").unwrap());
        assert_eq!(p.alternation_profile(), (1, 1));
        assert_eq!(p.as_formula(), parse("exists x. x in x").unwrap());
    }

    #[test]
    fn renames_clashing_binders() {
        let p = prenex(&parse("(exists x. x in y) & (forall x. !(x = y))").unwrap());
        let names: Vec<_> = p.blocks().iter().flat_map(|b| b.vars.clone()).collect();
        assert_eq!(names, vec![Var::new("x"), Var::new("x1")]);
        assert_eq!(
            p.as_formula(),
            parse("exists x. forall x1. (x in y & !(x1 = y))").unwrap()
        );
    }

    #[test]
    fn iff_with_quantifiers_expands() {
        let p = prenex(&parse("(exists x. x in x) <-> false").unwrap());
        // (∃x φ → ⊥) ∧ (⊥ → ∃x' φ)
        assert_eq!(p.alternation_profile(), (2, 1));
        assert_eq!(p.blocks()[0].kind, Quantifier::Forall);
        assert_eq!(p.quantifier_count(), 2);
    }

    #[test]
    fn bounded_quantifiers_are_expanded() {
        let p = prenex(&parse("forall x. exists y in x. y = y").unwrap());
        assert_eq!(p.alternation_profile(), (2, 1));
        assert!(p.as_formula().is_desugared());
    }
}
