use super::{Formula, Rel};

pub(super) fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn is_quantifier(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Exists(..)
            | Formula::Forall(..)
            | Formula::BoundedExists(..)
            | Formula::BoundedForall(..)
    )
}

// Binary nodes carry their own parentheses; atoms and quantifiers get wrapped.
fn write_wrapped(f: &Formula, out: &mut String) {
    match f {
        Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..) => {
            write(f, out)
        }
        _ => {
            out.push('(');
            write(f, out);
            out.push(')');
        }
    }
}

// Operand of a binary connective: a quantifier would swallow the rest.
fn write_operand(f: &Formula, out: &mut String) {
    if is_quantifier(f) {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

fn write(f: &Formula, out: &mut String) {
    use Formula::*;
    match f {
        Atom(rel, x, y) => {
            out.push_str(x.name());
            out.push_str(match rel {
                Rel::Mem => " in ",
                Rel::Eq => " = ",
            });
            out.push_str(y.name());
        }
        Const(true) => out.push_str("true"),
        Const(false) => out.push_str("false"),
        Not(g) => {
            out.push('!');
            write_wrapped(g, out);
        }
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
            let op = match f {
                And(..) => " & ",
                Or(..) => " | ",
                Implies(..) => " -> ",
                _ => " <-> ",
            };
            out.push('(');
            write_operand(a, out);
            out.push_str(op);
            write_operand(b, out);
            out.push(')');
        }
        Exists(x, g) | Forall(x, g) => {
            out.push_str(if matches!(f, Exists(..)) {
                "exists "
            } else {
                "forall "
            });
            out.push_str(x.name());
            out.push_str(". ");
            write(g, out);
        }
        BoundedExists(y, x, g) | BoundedForall(y, x, g) => {
            out.push_str(if matches!(f, BoundedExists(..)) {
                "exists "
            } else {
                "forall "
            });
            out.push_str(y.name());
            out.push_str(" in ");
            out.push_str(x.name());
            out.push_str(". ");
            write(g, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn render_examples() {
        assert_eq!(Formula::not(Formula::mem("x", "x")).render(), "!(x in x)");
        let a = Formula::mem("a", "b");
        let b = Formula::eq("c", "d");
        assert_eq!(
            Formula::and(a.clone(), b.clone()).render(),
            "(a in b & c = d)"
        );
        assert_eq!(Formula::exists("x", a.clone()).render(), "exists x. a in b");
        assert_eq!(
            Formula::not(Formula::and(a.clone(), b)).render(),
            "!(a in b & c = d)"
        );
    }

    #[test]
    fn quantified_operands_are_parenthesized() {
        let f = Formula::and(
            Formula::exists("x", Formula::eq("x", "x")),
            Formula::forall("y", Formula::eq("y", "y")),
        );
        let text = f.render();
        assert_eq!(text, "((exists x. x = x) & (forall y. y = y))");
        assert_eq!(parse(&text).unwrap(), f);
    }
}
