//! First-order formulas in the language `{∈, =}`.
//!
//! The AST keeps bounded quantifiers as their own nodes so that bounded
//! formulas (the output of quantifier elimination) can be evaluated directly
//! on concrete sets. [`Formula::desugar_bounded`] expands them.

mod parse;
mod prenex;
mod render;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse, ParseError};
pub use prenex::{prenex, Block, PrenexFormula, Quantifier};

/// A variable name. Cheap to clone and compare.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Mem,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `Atom(Mem, x, y)` is `x ∈ y`.
    Atom(Rel, Var, Var),
    Const(bool),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// `BoundedExists(y, x, φ)` is `∃y∈x φ`.
    BoundedExists(Var, Var, Box<Formula>),
    /// `BoundedForall(y, x, φ)` is `∀y∈x φ`.
    BoundedForall(Var, Var, Box<Formula>),
}

// Short constructors, used heavily by the axiom suite and tests.
impl Formula {
    pub fn mem(x: impl Into<Var>, y: impl Into<Var>) -> Self {
        Formula::Atom(Rel::Mem, x.into(), y.into())
    }

    pub fn eq(x: impl Into<Var>, y: impl Into<Var>) -> Self {
        Formula::Atom(Rel::Eq, x.into(), y.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<Var>, f: Formula) -> Self {
        Formula::Exists(x.into(), Box::new(f))
    }

    pub fn forall(x: impl Into<Var>, f: Formula) -> Self {
        Formula::Forall(x.into(), Box::new(f))
    }

    pub fn bounded_exists(y: impl Into<Var>, x: impl Into<Var>, f: Formula) -> Self {
        Formula::BoundedExists(y.into(), x.into(), Box::new(f))
    }

    pub fn bounded_forall(y: impl Into<Var>, x: impl Into<Var>, f: Formula) -> Self {
        Formula::BoundedForall(y.into(), x.into(), Box::new(f))
    }

    /// Conjunction of all items, `true` when empty. Left-nested.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Const(true))
    }

    /// Disjunction of all items, `false` when empty. Left-nested.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Const(false))
    }

    /// Expands bounded quantifiers: `∃y∈x φ` becomes `∃y (y∈x ∧ φ)` and
    /// `∀y∈x φ` becomes `∀y (y∈x → φ)`.
    pub fn desugar_bounded(&self) -> Formula {
        use Formula::*;
        match self {
            Atom(..) | Const(_) => self.clone(),
            Not(f) => Formula::not(f.desugar_bounded()),
            And(a, b) => Formula::and(a.desugar_bounded(), b.desugar_bounded()),
            Or(a, b) => Formula::or(a.desugar_bounded(), b.desugar_bounded()),
            Implies(a, b) => Formula::implies(a.desugar_bounded(), b.desugar_bounded()),
            Iff(a, b) => Formula::iff(a.desugar_bounded(), b.desugar_bounded()),
            Exists(x, f) => Formula::exists(x.clone(), f.desugar_bounded()),
            Forall(x, f) => Formula::forall(x.clone(), f.desugar_bounded()),
            BoundedExists(y, x, f) => Formula::exists(
                y.clone(),
                Formula::and(Formula::mem(y.clone(), x.clone()), f.desugar_bounded()),
            ),
            BoundedForall(y, x, f) => Formula::forall(
                y.clone(),
                Formula::implies(Formula::mem(y.clone(), x.clone()), f.desugar_bounded()),
            ),
        }
    }

    /// Quantifier rank. A bounded quantifier counts as one quantifier.
    pub fn rank(&self) -> u32 {
        use Formula::*;
        match self {
            Atom(..) | Const(_) => 0,
            Not(f) => f.rank(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.rank().max(b.rank()),
            Exists(_, f) | Forall(_, f) | BoundedExists(_, _, f) | BoundedForall(_, _, f) => {
                f.rank() + 1
            }
        }
    }

    /// Number of quantifier occurrences.
    pub fn quantifier_count(&self) -> usize {
        use Formula::*;
        match self {
            Atom(..) | Const(_) => 0,
            Not(f) => f.quantifier_count(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.quantifier_count() + b.quantifier_count()
            }
            Exists(_, f) | Forall(_, f) | BoundedExists(_, _, f) | BoundedForall(_, _, f) => {
                f.quantifier_count() + 1
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.quantifier_count() == 0
    }

    /// True if the formula has no bounded-quantifier nodes.
    pub fn is_desugared(&self) -> bool {
        use Formula::*;
        match self {
            Atom(..) | Const(_) => true,
            Not(f) | Exists(_, f) | Forall(_, f) => f.is_desugared(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.is_desugared() && b.is_desugared()
            }
            BoundedExists(..) | BoundedForall(..) => false,
        }
    }

    /// True if every quantifier is bounded.
    pub fn is_bounded(&self) -> bool {
        use Formula::*;
        match self {
            Atom(..) | Const(_) => true,
            Not(f) | BoundedExists(_, _, f) | BoundedForall(_, _, f) => f.is_bounded(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.is_bounded() && b.is_bounded(),
            Exists(..) | Forall(..) => false,
        }
    }

    /// Free variables in order of first occurrence, left to right.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        use Formula::*;
        let note = |v: &Var, bound: &Vec<Var>, out: &mut Vec<Var>| {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            Atom(_, x, y) => {
                note(x, bound, out);
                note(y, bound, out);
            }
            Const(_) => {}
            Not(f) => f.collect_free(bound, out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Exists(x, f) | Forall(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            BoundedExists(y, x, f) | BoundedForall(y, x, f) => {
                note(x, bound, out);
                bound.push(y.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn occurs_free(&self, v: &Var) -> bool {
        use Formula::*;
        match self {
            Atom(_, x, y) => x == v || y == v,
            Const(_) => false,
            Not(f) => f.occurs_free(v),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.occurs_free(v) || b.occurs_free(v)
            }
            Exists(x, f) | Forall(x, f) => x != v && f.occurs_free(v),
            BoundedExists(y, x, f) | BoundedForall(y, x, f) => {
                x == v || (y != v && f.occurs_free(v))
            }
        }
    }

    /// All variable names appearing anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Var)) {
        use Formula::*;
        match self {
            Atom(_, x, y) => {
                f(x);
                f(y);
            }
            Const(_) => {}
            Not(a) => a.visit_vars(f),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Exists(x, a) | Forall(x, a) => {
                f(x);
                a.visit_vars(f);
            }
            BoundedExists(y, x, a) | BoundedForall(y, x, a) => {
                f(y);
                f(x);
                a.visit_vars(f);
            }
        }
    }

    /// Renders the fully parenthesized canonical text form.
    pub fn render(&self) -> String {
        render::render(self)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Returns `base` if unused, otherwise `base` followed by the smallest
/// numeric suffix not in `used`.
pub(crate) fn fresh_name(base: &str, used: &BTreeSet<Var>) -> Var {
    let candidate = Var::new(base);
    if !used.contains(&candidate) {
        return candidate;
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { base } else { stem };
    (1..)
        .map(|i| Var::new(&format!("{stem}{i}")))
        .find(|v| !used.contains(v))
        .expect("unbounded suffix search")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn desugar_examples() {
        let f = Formula::bounded_exists("y", "x", Formula::eq("y", "y"));
        assert_eq!(
            f.desugar_bounded(),
            Formula::exists(
                "y",
                Formula::and(Formula::mem("y", "x"), Formula::eq("y", "y"))
            )
        );
        let g = Formula::bounded_forall("y", "x", Formula::eq("y", "y"));
        assert_eq!(
            g.desugar_bounded(),
            Formula::forall(
                "y",
                Formula::implies(Formula::mem("y", "x"), Formula::eq("y", "y"))
            )
        );
        let a = Formula::mem("x", "y");
        assert_eq!(a.desugar_bounded(), a);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Formula::mem("x", "y").rank(), 0);
        assert_eq!(p("exists x. forall t. !(t in x)").rank(), 2);
        assert_eq!(p("(exists x. x = x) & (exists y. y = y)").rank(), 1);
        assert_eq!(p("exists y in x. y = y").rank(), 1);
    }

    #[test]
    fn free_variables_in_order() {
        let f = p("(y in x & exists x. x in z)");
        assert_eq!(
            f.free_vars(),
            vec![Var::new("y"), Var::new("x"), Var::new("z")]
        );
        assert!(p("forall x. exists y. x in y").is_sentence());
        let g = p("exists y in x. y = y");
        assert_eq!(g.free_vars(), vec![Var::new("x")]);
    }

    #[test]
    fn fresh_names_use_numeric_suffix() {
        let used: BTreeSet<Var> = ["x", "x1", "y"].iter().map(|s| Var::new(s)).collect();
        assert_eq!(fresh_name("x", &used), Var::new("x2"));
        assert_eq!(fresh_name("z", &used), Var::new("z"));
        assert_eq!(fresh_name("x1", &used), Var::new("x2"));
    }
}
