//! Direct evaluation of arbitrary formulas on concrete sets, with unbounded
//! quantifiers ranging over finite windows of `H_k`.
//!
//! In `H_1` (a successor structure) an element far from everything chosen so
//! far is indistinguishable, up to the remaining rank `r`, from one at
//! distance about `2^r`. So letting the quantifier at nesting depth `j`
//! range over sets of height at most `base + (j+1)·w` with `w > 2^rank`
//! gives the true value in `H_1`.

use crate::formula::{Formula, Rel, Var};
use crate::hset::{EvalError, HSet};

/// All sets of `H_k` of rank at most `height`.
pub fn universe(k: usize, height: usize) -> Vec<HSet> {
    use itertools::Itertools;
    let mut level = vec![HSet::empty()];
    for _ in 0..height {
        let next: Vec<HSet> = (0..=k.min(level.len()))
            .flat_map(|s| level.iter().cloned().combinations(s))
            .map(HSet::from_children)
            .collect();
        level = next;
    }
    level.sort();
    level
}

fn lookup<'a>(env: &'a [(Var, HSet)], v: &Var) -> Result<&'a HSet, EvalError> {
    env.iter()
        .rev()
        .find(|(name, _)| name == v)
        .map(|(_, s)| s)
        .ok_or_else(|| EvalError::Unassigned(v.to_string()))
}

fn eval(
    f: &Formula,
    env: &mut Vec<(Var, HSet)>,
    windows: &[Vec<HSet>],
    depth: usize,
) -> Result<bool, EvalError> {
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
        Not(g) => !eval(g, env, windows, depth)?,
        And(a, b) => eval(a, env, windows, depth)? && eval(b, env, windows, depth)?,
        Or(a, b) => eval(a, env, windows, depth)? || eval(b, env, windows, depth)?,
        Implies(a, b) => !eval(a, env, windows, depth)? || eval(b, env, windows, depth)?,
        Iff(a, b) => eval(a, env, windows, depth)? == eval(b, env, windows, depth)?,
        Exists(y, g) | Forall(y, g) | BoundedExists(y, _, g) | BoundedForall(y, _, g) => {
            let want = matches!(f, Exists(..) | BoundedExists(..));
            let range: Vec<HSet> = match f {
                BoundedExists(_, x, _) | BoundedForall(_, x, _) => {
                    lookup(env, x)?.children().to_vec()
                }
                _ => windows[depth.min(windows.len() - 1)].clone(),
            };
            for c in range {
                env.push((y.clone(), c));
                let r = eval(g, env, windows, depth + 1);
                env.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

/// Evaluates `f` with the unbounded quantifier at nesting depth `j` ranging
/// over `windows[j]` (the last window for deeper ones).
pub fn eval_in_windows(
    f: &Formula,
    assignment: &[(Var, HSet)],
    windows: &[Vec<HSet>],
) -> Result<bool, EvalError> {
    assert!(!windows.is_empty());
    let mut env = assignment.to_vec();
    eval(f, &mut env, windows, 0)
}

/// Truth in `H_1`, evaluated on nested windows of width `w` above the
/// tallest parameter. Returns `None` if doubling `w` changes the value.
pub fn eval_h1(f: &Formula, assignment: &[(Var, HSet)]) -> Result<Option<bool>, EvalError> {
    let base = assignment
        .iter()
        .map(|(_, s)| height_h1(s))
        .max()
        .unwrap_or(0);
    let w = (1usize << f.rank().min(16)) + 2;
    let run = |w: usize| {
        let windows: Vec<Vec<HSet>> = (0..=f.rank() as usize)
            .map(|j| (0..=base + (j + 1) * w).map(HSet::tower).collect())
            .collect();
        eval_in_windows(f, assignment, &windows)
    };
    let (a, b) = (run(w)?, run(2 * w)?);
    Ok((a == b).then_some(a))
}

fn height_h1(s: &HSet) -> usize {
    let mut h = 0;
    let mut x = s.clone();
    while let Some(c) = x.children().first().cloned() {
        h += 1;
        x = c;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn universe_sizes() {
        assert_eq!(universe(1, 4).len(), 5);
        assert_eq!(universe(2, 2).len(), 4);
        assert_eq!(universe(2, 3).len(), 11);
        assert_eq!(universe(0, 3).len(), 1);
    }

    #[test]
    fn successor_facts() {
        let h = |s: &str| eval_h1(&parse(s).unwrap(), &[]).unwrap();
        assert_eq!(h("forall x. exists y. x in y"), Some(true));
        assert_eq!(h("exists x. forall y. !(x in y)"), Some(false));
        assert_eq!(h("exists y. forall t. !(t in y)"), Some(true));
        assert_eq!(h("forall x. forall y. (x in y -> !(y in x))"), Some(true));
    }
}
