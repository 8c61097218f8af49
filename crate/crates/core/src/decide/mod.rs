//! Bound arithmetic, the rank-driven and block-wise decision algorithms,
//! and quantifier elimination.

pub mod bounds;
mod engine;
mod qe;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

pub use bounds::{bound_check, bound_check_block, c_k, k_leq, supexp, t_block, t_rank};
pub use engine::TraceSink;
pub use qe::{characteristic_formula, defining_formula, quantifier_eliminate};

use crate::formula::{prenex, Formula, PrenexFormula, Var};
use crate::limits::{LimitError, Limits};
use crate::structure::{Dag, TclStructure};
use engine::{Engine, Program};

pub const DEFAULT_CACHE_ENTRIES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Prenex form, whole quantifier blocks per step.
    Block,
    /// One quantifier per step, levels from the quantifier rank.
    Rank,
    /// Propositional reduction, only for `k = 0`.
    K0,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Block => "block",
            Algorithm::Rank => "rank",
            Algorithm::K0 => "k0",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "block" => Ok(Algorithm::Block),
            "rank" => Ok(Algorithm::Rank),
            "k0" => Ok(Algorithm::K0),
            other => Err(format!(
                "unknown algorithm `{other}` (expected block, rank or k0)"
            )),
        }
    }
}

#[derive(Clone)]
pub struct Options {
    pub algorithm: Algorithm,
    pub limits: Limits,
    /// Memo entries; 0 disables the cache.
    pub cache_entries: usize,
    /// Caps every level at this value. Results are no longer guaranteed.
    pub unsound_m: Option<u64>,
    pub trace: Option<TraceSink>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            algorithm: Algorithm::Block,
            limits: Limits::default(),
            cache_entries: DEFAULT_CACHE_ENTRIES,
            unsound_m: None,
            trace: None,
        }
    }
}

impl fmt::Debug for Options {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Options")
            .field("algorithm", &self.algorithm)
            .field("limits", &self.limits)
            .field("cache_entries", &self.cache_entries)
            .field("unsound_m", &self.unsound_m)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub value: bool,
    pub algorithm: Algorithm,
    pub m_used: BigUint,
    pub structures_enumerated: u64,
    pub cache_hits: u64,
    pub elapsed: Duration,
    pub sound: bool,
}

#[derive(Serialize)]
struct VerdictJson<'a> {
    value: bool,
    algorithm: Algorithm,
    m: &'a str,
    structures: u64,
    cache_hits: u64,
    elapsed_ms: u64,
    sound: bool,
}

impl Verdict {
    /// Single JSON object. `elapsed_ms` is 0 unless `timing` is set, so
    /// repeated runs print identical bytes.
    pub fn to_json(&self, timing: bool) -> String {
        let m = self.m_used.to_string();
        serde_json::to_string(&VerdictJson {
            value: self.value,
            algorithm: self.algorithm,
            m: &m,
            structures: self.structures_enumerated,
            cache_hits: self.cache_hits,
            elapsed_ms: if timing {
                self.elapsed.as_millis() as u64
            } else {
                0
            },
            sound: self.sound,
        })
        .expect("verdict serializes")
    }

    /// `key=value` lines.
    pub fn to_text(&self, timing: bool) -> String {
        let mut out = format!(
            "value={}\nalgorithm={}\nm={}\nstructures={}\ncache_hits={}\nsound={}\n",
            self.value,
            self.algorithm,
            self.m_used,
            self.structures_enumerated,
            self.cache_hits,
            self.sound
        );
        if timing {
            out.push_str(&format!("elapsed_ms={}\n", self.elapsed.as_millis()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("formula has free variables: {0}")]
    NotASentence(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{error} (after {structures} structures, {cache_hits} cache hits)")]
    Limit {
        error: LimitError,
        structures: u64,
        cache_hits: u64,
    },
}

impl From<LimitError> for DecideError {
    fn from(error: LimitError) -> Self {
        DecideError::Limit {
            error,
            structures: 0,
            cache_hits: 0,
        }
    }
}

impl From<crate::structure::StructureError> for DecideError {
    fn from(e: crate::structure::StructureError) -> Self {
        match e {
            crate::structure::StructureError::Limit(l) => l.into(),
            other => DecideError::Precondition(other.to_string()),
        }
    }
}

impl DecideError {
    pub fn limit(&self) -> Option<&LimitError> {
        match self {
            DecideError::Limit { error, .. } => Some(error),
            _ => None,
        }
    }
}

fn to_level(v: Result<BigUint, LimitError>) -> u64 {
    v.ok().and_then(|b| b.to_u64()).unwrap_or(u64::MAX)
}

fn capped(required: u64, opts: &Options) -> u64 {
    opts.unsound_m.map_or(required, |cap| required.min(cap))
}

/// Runs a compiled program on `dag` at level `m` and packages the verdict.
#[allow(clippy::too_many_arguments)]
fn execute(
    program: &Program,
    root: u32,
    dag: &Dag,
    m: u64,
    m_used: BigUint,
    sound: bool,
    k: usize,
    opts: &Options,
    started: Instant,
) -> Result<Verdict, DecideError> {
    let engine = Engine::new(
        program,
        k,
        opts.limits,
        opts.cache_entries,
        opts.trace.clone(),
    );
    match engine.run(root, dag, m) {
        Ok((value, explored)) => Ok(Verdict {
            value,
            algorithm: opts.algorithm,
            m_used,
            structures_enumerated: explored,
            cache_hits: engine.cache_hits.load(std::sync::atomic::Ordering::Relaxed),
            elapsed: started.elapsed(),
            sound,
        }),
        Err(a) => Err(DecideError::Limit {
            error: a.error,
            structures: a.explored,
            cache_hits: engine.cache_hits.load(std::sync::atomic::Ordering::Relaxed),
        }),
    }
}

/// Decides a sentence in `S_k` by running the selected algorithm on the
/// empty structure at the required level.
pub fn decide(k: usize, phi: &Formula, opts: &Options) -> Result<Verdict, DecideError> {
    let started = Instant::now();
    let free = phi.free_vars();
    if !free.is_empty() {
        let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
        return Err(DecideError::NotASentence(names.join(", ")));
    }
    let f = phi.desugar_bounded();
    let empty = Dag::empty();
    match opts.algorithm {
        Algorithm::K0 => {
            if k != 0 {
                return Err(DecideError::Precondition(
                    "the propositional reduction needs k = 0".into(),
                ));
            }
            Ok(Verdict {
                value: crate::oracle::eval_k0(&f),
                algorithm: Algorithm::K0,
                m_used: BigUint::from(0u32),
                structures_enumerated: 0,
                cache_hits: 0,
                elapsed: started.elapsed(),
                sound: true,
            })
        }
        Algorithm::Rank => {
            let m_used = t_rank(k as u64, u64::from(f.rank()))?;
            let level_of = |n: u32| capped(to_level(t_rank(k as u64, u64::from(n))), opts);
            let (program, root) = Program::rank(&f, &[], &level_of);
            let m = capped(to_level(Ok(m_used.clone())), opts);
            let sound = BigUint::from(m) >= m_used;
            execute(
                &program,
                root,
                &empty,
                m,
                BigUint::from(m),
                sound,
                k,
                opts,
                started,
            )
        }
        Algorithm::Block => {
            let p = prenex(&f);
            let (r, q) = p.alternation_profile();
            let m_used = t_block(k as u64, r as u64, q as u64)?;
            let level_of = |r: u64, q: u64| capped(to_level(t_block(k as u64, r, q)), opts);
            let (program, root) = Program::block(&p, &[], &level_of);
            let m = capped(to_level(Ok(m_used.clone())), opts);
            let sound = BigUint::from(m) >= m_used;
            execute(
                &program,
                root,
                &empty,
                m,
                BigUint::from(m),
                sound,
                k,
                opts,
                started,
            )
        }
    }
}

fn check_assignment(s: &TclStructure, f: &Formula, vars: &[Var]) -> Result<(), DecideError> {
    if vars.len() != s.tuple_len() {
        return Err(DecideError::Precondition(format!(
            "{} variables for a tuple of length {}",
            vars.len(),
            s.tuple_len()
        )));
    }
    if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(DecideError::Precondition(format!(
            "free variable `{v}` is not assigned"
        )));
    }
    Ok(())
}

fn check_level(
    s: &TclStructure,
    k: usize,
    m: u64,
    required: &BigUint,
    opts: &Options,
) -> Result<(), DecideError> {
    if !s.validate(k, m) {
        return Err(DecideError::Precondition(format!(
            "structure is not a tcl^{k}_{m} structure"
        )));
    }
    if opts.unsound_m.is_none() && BigUint::from(m) < *required {
        return Err(DecideError::Precondition(format!(
            "level {m} is below the required {required}"
        )));
    }
    Ok(())
}

/// `S ⊨ φ(ā)` by the rank-driven algorithm. `vars[i]` names tuple position
/// `i`; `s` must be a structure at level `m ≥ t_k(rank φ)`.
pub fn sksat(
    s: &TclStructure,
    m: u64,
    phi: &Formula,
    vars: &[Var],
    k: usize,
    opts: &Options,
) -> Result<Verdict, DecideError> {
    let started = Instant::now();
    let f = phi.desugar_bounded();
    check_assignment(s, &f, vars)?;
    let required = t_rank(k as u64, u64::from(f.rank()))?;
    check_level(s, k, m, &required, opts)?;
    let level_of = |n: u32| capped(to_level(t_rank(k as u64, u64::from(n))), opts);
    let (program, root) = Program::rank(&f, vars, &level_of);
    let opts = Options {
        algorithm: Algorithm::Rank,
        ..opts.clone()
    };
    execute(
        &program,
        root,
        s.dag(),
        m,
        BigUint::from(m),
        BigUint::from(m) >= required,
        k,
        &opts,
        started,
    )
}

/// `S ⊨ φ(ā)` by the block-wise algorithm on a prenex formula.
pub fn bsksat(
    s: &TclStructure,
    m: u64,
    p: &PrenexFormula,
    vars: &[Var],
    k: usize,
    opts: &Options,
) -> Result<Verdict, DecideError> {
    let started = Instant::now();
    check_assignment(s, &p.as_formula(), vars)?;
    let (r, q) = p.alternation_profile();
    let required = t_block(k as u64, r as u64, q as u64)?;
    check_level(s, k, m, &required, opts)?;
    let level_of = |r: u64, q: u64| capped(to_level(t_block(k as u64, r, q)), opts);
    let (program, root) = Program::block(p, vars, &level_of);
    let opts = Options {
        algorithm: Algorithm::Block,
        ..opts.clone()
    };
    execute(
        &program,
        root,
        s.dag(),
        m,
        BigUint::from(m),
        BigUint::from(m) >= required,
        k,
        &opts,
        started,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn run(k: usize, text: &str, algorithm: Algorithm) -> bool {
        let opts = Options {
            algorithm,
            ..Options::default()
        };
        decide(k, &parse(text).unwrap(), &opts).unwrap().value
    }

    #[test]
    fn small_sentences() {
        for algo in [Algorithm::Block, Algorithm::Rank] {
            assert!(!run(2, "exists x. x in x", algo));
            assert!(run(1, "exists y. forall t. !(t in y)", algo));
            assert!(!run(0, "exists x, y. !(x = y)", algo));
            assert!(run(1, "forall x. (!(x = x) | exists y. x in y)", algo));
            assert!(run(1, "exists x, y. x in y", algo));
            assert!(run(1, "forall x. exists y. x in y", algo));
        }
    }

    #[test]
    fn two_cycle_is_refuted() {
        assert!(!run(
            2,
            "exists x0, x1. (x0 in x1 & x1 in x0)",
            Algorithm::Block
        ));
    }

    #[test]
    fn size_bound_for_pairs() {
        let b2 = "forall x, u0, u1, u2. ((u0 in x & u1 in x & u2 in x) -> (u0 = u1 | u0 = u2 | u1 = u2))";
        assert!(run(2, b2, Algorithm::Block));
    }

    #[test]
    fn sksat_on_atoms() {
        let s = TclStructure::from_parts(&["a", "b"], &[("a", "b")], &["a", "b"]).unwrap();
        let vars = [Var::new("a0"), Var::new("b0")];
        let opts = Options::default();
        assert!(
            sksat(&s, 1, &parse("b0 in a0").unwrap(), &vars, 1, &opts)
                .unwrap()
                .value
        );
        assert!(
            !sksat(&s, 1, &parse("a0 in b0").unwrap(), &vars, 1, &opts)
                .unwrap()
                .value
        );
    }

    #[test]
    fn low_level_is_refused() {
        let s = TclStructure::from_parts(&["a"], &[], &["a"]).unwrap();
        let f = parse("exists y. y in x").unwrap();
        let err = sksat(&s, 1, &f, &[Var::new("x")], 1, &Options::default()).unwrap_err();
        assert!(matches!(err, DecideError::Precondition(_)));
        let opts = Options {
            unsound_m: Some(1),
            ..Options::default()
        };
        let v = sksat(&s, 1, &f, &[Var::new("x")], 1, &opts).unwrap();
        assert!(!v.sound);
    }

    #[test]
    fn cache_does_not_change_counts() {
        let f = parse("forall x. exists y. forall z. (z in y <-> z = x)").unwrap();
        for algorithm in [Algorithm::Block, Algorithm::Rank] {
            let with = decide(
                1,
                &f,
                &Options {
                    algorithm,
                    ..Options::default()
                },
            )
            .unwrap();
            let without = decide(
                1,
                &f,
                &Options {
                    algorithm,
                    cache_entries: 0,
                    ..Options::default()
                },
            )
            .unwrap();
            assert!(with.value && without.value);
            assert_eq!(with.structures_enumerated, without.structures_enumerated);
            assert_eq!(without.cache_hits, 0);
        }
    }

    #[test]
    fn verdict_json_is_stable() {
        let v = decide(1, &parse("exists x. x = x").unwrap(), &Options::default()).unwrap();
        let json = v.to_json(false);
        assert!(
            json.starts_with("{\"value\":true,\"algorithm\":\"block\",\"m\":\"3\""),
            "{json}"
        );
        assert!(json.contains("\"elapsed_ms\":0"));
    }
}
