//! `H_0` has a single element, the empty set: every `x ∈ y` is false, every
//! `x = y` is true, and quantifiers are vacuous.

use crate::formula::{Formula, Rel};

pub fn eval_k0(f: &Formula) -> bool {
    use Formula::*;
    match f {
        Atom(Rel::Mem, ..) => false,
        Atom(Rel::Eq, ..) => true,
        Const(b) => *b,
        Not(g) => !eval_k0(g),
        And(a, b) => eval_k0(a) && eval_k0(b),
        Or(a, b) => eval_k0(a) || eval_k0(b),
        Implies(a, b) => !eval_k0(a) || eval_k0(b),
        Iff(a, b) => eval_k0(a) == eval_k0(b),
        Exists(_, g) | Forall(_, g) => eval_k0(g),
        // the bound is empty
        BoundedExists(..) => false,
        BoundedForall(..) => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn single_element() {
        assert!(!eval_k0(&parse("exists x, y. !(x = y)").unwrap()));
        assert!(eval_k0(&parse("forall x. forall y in x. false").unwrap()));
        assert!(!eval_k0(&parse("exists x. x in x").unwrap()));
    }
}
