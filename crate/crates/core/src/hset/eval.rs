use thiserror::Error;

use super::HSet;
use crate::formula::{Formula, Rel, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbounded quantifier over `{0}`")]
    Unbounded(String),
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
}

fn lookup<'a>(env: &'a [(Var, HSet)], v: &Var) -> Result<&'a HSet, EvalError> {
    env.iter()
        .rev()
        .find(|(name, _)| name == v)
        .map(|(_, s)| s)
        .ok_or_else(|| EvalError::Unassigned(v.to_string()))
}

fn eval(f: &Formula, env: &mut Vec<(Var, HSet)>) -> Result<bool, EvalError> {
    use Formula::*;
    Ok(match f {
        Atom(rel, x, y) => {
            let (a, b) = (lookup(env, x)?, lookup(env, y)?);
            match rel {
                Rel::Mem => b.contains(a),
                Rel::Eq => a == b,
            }
        }
        Const(b) => *b,
        Not(g) => !eval(g, env)?,
        And(a, b) => eval(a, env)? && eval(b, env)?,
        Or(a, b) => eval(a, env)? || eval(b, env)?,
        Implies(a, b) => !eval(a, env)? || eval(b, env)?,
        Iff(a, b) => eval(a, env)? == eval(b, env)?,
        Exists(y, _) | Forall(y, _) => return Err(EvalError::Unbounded(y.to_string())),
        BoundedExists(y, x, g) | BoundedForall(y, x, g) => {
            let want = matches!(f, BoundedExists(..));
            let range = lookup(env, x)?.clone();
            for c in range.children() {
                env.push((y.clone(), c.clone()));
                let r = eval(g, env);
                env.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

fn first_unbounded(f: &Formula) -> Option<&Var> {
    use Formula::*;
    match f {
        Atom(..) | Const(_) => None,
        Exists(y, _) | Forall(y, _) => Some(y),
        Not(g) | BoundedExists(_, _, g) | BoundedForall(_, _, g) => first_unbounded(g),
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
            first_unbounded(a).or_else(|| first_unbounded(b))
        }
    }
}

/// Evaluates a bounded formula on concrete sets; bounded quantifiers range
/// over the elements of their bound.
pub fn eval_bounded(f: &Formula, assignment: &[(Var, HSet)]) -> Result<bool, EvalError> {
    if let Some(v) = first_unbounded(f) {
        return Err(EvalError::Unbounded(v.to_string()));
    }
    if let Some(v) = f
        .free_vars()
        .into_iter()
        .find(|v| !assignment.iter().any(|(n, _)| n == v))
    {
        return Err(EvalError::Unassigned(v.to_string()));
    }
    let mut env = assignment.to_vec();
    eval(f, &mut env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::hset::parse_set;

    fn run(text: &str, assignment: &[(&str, &str)]) -> Result<bool, EvalError> {
        let a: Vec<(Var, HSet)> = assignment
            .iter()
            .map(|(v, s)| (Var::new(v), parse_set(s).unwrap()))
            .collect();
        eval_bounded(&parse(text).unwrap(), &a)
    }

    #[test]
    fn direct_evaluation() {
        assert_eq!(run("forall t in x. false", &[("x", "{}")]), Ok(true));
        assert_eq!(
            run("exists t in x. forall s in t. false", &[("x", "{{{}}}")]),
            Ok(false)
        );
        assert_eq!(run("x in y", &[("x", "{}"), ("y", "{{}}")]), Ok(true));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            run("exists y. y in x", &[("x", "{}")]),
            Err(EvalError::Unbounded(_))
        ));
        assert!(matches!(
            run("x in y", &[("x", "{}")]),
            Err(EvalError::Unassigned(_))
        ));
        assert!(matches!(
            run("false & exists y. true", &[]),
            Err(EvalError::Unbounded(_))
        ));
    }
}
