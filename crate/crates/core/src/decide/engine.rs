//! The recursive search shared by the rank-driven and block-wise
//! algorithms. Formulas are compiled into an arena whose atoms refer to
//! tuple positions; each quantifier node knows the level its body needs.

use std::hash::{Hash, Hasher};
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use lru::LruCache;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::formula::{Formula, PrenexFormula, Quantifier, Rel, Var};
use crate::limits::{LimitError, Limits};
use crate::structure::{canonical, generate, level, CanonicalKey, Dag, Dedup, Extension};

pub type TraceSink = Arc<dyn Fn(&str) + Send + Sync>;

pub(crate) type NodeId = u32;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Const(bool),
    Mem(usize, usize),
    Eq(usize, usize),
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Implies(NodeId, NodeId),
    Iff(NodeId, NodeId),
    /// Scans extensions of the structure restricted to `keep` by `width`
    /// new entries at level `level`; the body sees `keep ++ new`.
    Quant {
        kind: Quantifier,
        keep: Vec<usize>,
        width: usize,
        level: u64,
        body: NodeId,
    },
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Program {
    pub nodes: Vec<Node>,
}

impl Program {
    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        (self.nodes.len() - 1) as NodeId
    }

    fn position(env: &[Var], v: &Var) -> usize {
        env.iter().rposition(|e| e == v).expect("variable in scope")
    }

    fn quantifier_free(&mut self, f: &Formula, env: &[Var]) -> NodeId {
        use Formula::*;
        let node = match f {
            Atom(Rel::Mem, x, y) => Node::Mem(Self::position(env, x), Self::position(env, y)),
            Atom(Rel::Eq, x, y) => Node::Eq(Self::position(env, x), Self::position(env, y)),
            Const(b) => Node::Const(*b),
            Not(g) => Node::Not(self.quantifier_free(g, env)),
            And(a, b) => Node::And(self.quantifier_free(a, env), self.quantifier_free(b, env)),
            Or(a, b) => Node::Or(self.quantifier_free(a, env), self.quantifier_free(b, env)),
            Implies(a, b) => {
                Node::Implies(self.quantifier_free(a, env), self.quantifier_free(b, env))
            }
            Iff(a, b) => Node::Iff(self.quantifier_free(a, env), self.quantifier_free(b, env)),
            _ => unreachable!("quantifier in matrix"),
        };
        self.push(node)
    }

    /// Compiles a desugared formula for the rank-driven algorithm. `env`
    /// lists the variables bound to tuple positions.
    pub fn rank(f: &Formula, env: &[Var], level_of: &dyn Fn(u32) -> u64) -> (Program, NodeId) {
        let mut p = Program::default();
        let root = p.rank_node(f, env, level_of);
        (p, root)
    }

    fn rank_node(&mut self, f: &Formula, env: &[Var], level_of: &dyn Fn(u32) -> u64) -> NodeId {
        use Formula::*;
        let node = match f {
            Atom(..) | Const(_) => return self.quantifier_free(f, env),
            Not(g) => Node::Not(self.rank_node(g, env, level_of)),
            And(a, b) => Node::And(
                self.rank_node(a, env, level_of),
                self.rank_node(b, env, level_of),
            ),
            Or(a, b) => Node::Or(
                self.rank_node(a, env, level_of),
                self.rank_node(b, env, level_of),
            ),
            Implies(a, b) => Node::Implies(
                self.rank_node(a, env, level_of),
                self.rank_node(b, env, level_of),
            ),
            Iff(a, b) => Node::Iff(
                self.rank_node(a, env, level_of),
                self.rank_node(b, env, level_of),
            ),
            Exists(x, g) | Forall(x, g) => {
                // Keep only the positions the quantified formula mentions;
                // later bindings shadow earlier ones.
                let free = f.free_vars();
                let mut keep: Vec<usize> = free.iter().map(|v| Self::position(env, v)).collect();
                keep.sort_unstable();
                let mut inner: Vec<Var> = keep.iter().map(|&i| env[i].clone()).collect();
                inner.push(x.clone());
                let body = self.rank_node(g, &inner, level_of);
                Node::Quant {
                    kind: if matches!(f, Exists(..)) {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    },
                    keep,
                    width: 1,
                    level: level_of(g.rank()),
                    body,
                }
            }
            BoundedExists(..) | BoundedForall(..) => {
                return self.rank_node(&f.desugar_bounded(), env, level_of)
            }
        };
        self.push(node)
    }

    /// Compiles a prenex formula for the block-wise algorithm.
    /// `level_of(r, q)` gives the level required by a formula with `r`
    /// blocks of size at most `q`.
    pub fn block(
        p: &PrenexFormula,
        env: &[Var],
        level_of: &dyn Fn(u64, u64) -> u64,
    ) -> (Program, NodeId) {
        let mut prog = Program::default();
        let mut full: Vec<Var> = env.to_vec();
        for b in p.blocks() {
            full.extend(b.vars.iter().cloned());
        }
        let mut next = prog.quantifier_free(p.matrix(), &full);
        let blocks = p.blocks();
        let mut width_before = full.len();
        for i in (0..blocks.len()).rev() {
            let b = &blocks[i];
            width_before -= b.vars.len();
            let rest = &blocks[i + 1..];
            let q = rest
                .iter()
                .map(|b| b.vars.len())
                .max()
                .unwrap_or(0)
                .max(b.vars.len());
            next = prog.push(Node::Quant {
                kind: b.kind,
                keep: (0..width_before).collect(),
                width: b.vars.len(),
                level: level_of(rest.len() as u64, q as u64),
                body: next,
            });
        }
        (prog, next)
    }
}

/// Outcome of one subproblem: the value and how many structures its search
/// stepped through.
#[derive(Clone, Copy, Debug)]
struct Outcome {
    value: bool,
    explored: u64,
}

const SHARDS: usize = 16;

struct Memo {
    shards: Vec<Mutex<LruCache<(CanonicalKey, NodeId), Outcome>>>,
}

impl Memo {
    fn new(capacity: usize) -> Option<Memo> {
        let per = NonZeroUsize::new(capacity.div_ceil(SHARDS))?;
        Some(Memo {
            shards: (0..SHARDS)
                .map(|_| Mutex::new(LruCache::new(per)))
                .collect(),
        })
    }

    fn shard(
        &self,
        key: &(CanonicalKey, NodeId),
    ) -> &Mutex<LruCache<(CanonicalKey, NodeId), Outcome>> {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        key.hash(&mut h);
        &self.shards[(h.finish() as usize) % SHARDS]
    }

    fn get(&self, key: &(CanonicalKey, NodeId)) -> Option<Outcome> {
        self.shard(key).lock().unwrap().get(key).copied()
    }

    fn put(&self, key: (CanonicalKey, NodeId), o: Outcome) {
        self.shard(&key).lock().unwrap().put(key, o);
    }
}

pub(crate) struct Engine<'a> {
    pub program: &'a Program,
    pub k: usize,
    pub limits: Limits,
    memo: Option<Memo>,
    pub cache_hits: AtomicU64,
    pub trace: Option<TraceSink>,
}

/// Error raised mid-search together with the number of structures stepped
/// through so far.
#[derive(Debug)]
pub(crate) struct Aborted {
    pub error: LimitError,
    pub explored: u64,
}

impl<'a> Engine<'a> {
    pub fn new(
        program: &'a Program,
        k: usize,
        limits: Limits,
        cache: usize,
        trace: Option<TraceSink>,
    ) -> Self {
        Engine {
            program,
            k,
            limits,
            memo: Memo::new(cache),
            cache_hits: AtomicU64::new(0),
            trace,
        }
    }

    fn emit(&self, line: impl FnOnce() -> String) {
        if let Some(t) = &self.trace {
            t(&line());
        }
    }

    /// Evaluates `node` on `dag`, a structure at level `m`.
    pub fn run(&self, node: NodeId, dag: &Dag, m: u64) -> Result<(bool, u64), Aborted> {
        let mut explored = 0;
        match self.eval(node, dag, m, 0, &mut explored) {
            Ok(v) => Ok((v, explored)),
            Err(error) => Err(Aborted { error, explored }),
        }
    }

    fn eval(
        &self,
        node: NodeId,
        dag: &Dag,
        m: u64,
        depth: usize,
        explored: &mut u64,
    ) -> Result<bool, LimitError> {
        let t = dag.tuple();
        Ok(match &self.program.nodes[node as usize] {
            Node::Const(b) => *b,
            Node::Mem(x, y) => dag.has_edge(t[*y], t[*x]),
            Node::Eq(x, y) => t[*x] == t[*y],
            Node::Not(a) => !self.eval(*a, dag, m, depth, explored)?,
            Node::And(a, b) => {
                self.eval(*a, dag, m, depth, explored)? && self.eval(*b, dag, m, depth, explored)?
            }
            Node::Or(a, b) => {
                self.eval(*a, dag, m, depth, explored)? || self.eval(*b, dag, m, depth, explored)?
            }
            Node::Implies(a, b) => {
                !self.eval(*a, dag, m, depth, explored)?
                    || self.eval(*b, dag, m, depth, explored)?
            }
            Node::Iff(a, b) => {
                self.eval(*a, dag, m, depth, explored)? == self.eval(*b, dag, m, depth, explored)?
            }
            Node::Quant {
                kind,
                keep,
                width,
                level: lvl,
                body,
            } => {
                let (base, _) = dag.restrict(m, keep);
                let (base, key) = canonical(&base);
                let o = self.quantifier(node, *kind, &base, key, m, *width, *lvl, *body, depth)?;
                *explored += o.explored;
                o.value
            }
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn quantifier(
        &self,
        node: NodeId,
        kind: Quantifier,
        base: &Dag,
        key: CanonicalKey,
        m: u64,
        width: usize,
        lvl: u64,
        body: NodeId,
        depth: usize,
    ) -> Result<Outcome, LimitError> {
        let memo_key = (key, node);
        if let Some(memo) = &self.memo {
            if let Some(o) = memo.get(&memo_key) {
                self.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(o);
            }
        }
        self.limits.check_deadline()?;
        let lvl32 = level(self.k, lvl, base.tuple().len() + width, &self.limits)?;
        let exts = generate(
            base,
            self.k,
            m,
            width,
            lvl32,
            Dedup::Restriction,
            &self.limits,
        )?;
        self.emit(|| {
            format!(
                "scan depth={depth} node={node} level={lvl} base_nodes={} extensions={}",
                base.len(),
                exts.len()
            )
        });
        // ∃ stops at the first true body, ∀ at the first false one.
        let stop = kind == Quantifier::Exists;
        let step = |e: &Extension| -> Result<Outcome, LimitError> {
            let mut sub = 0;
            let v = self.eval(body, &e.dag, lvl, depth + 1, &mut sub)?;
            Ok(Outcome {
                value: v,
                explored: sub,
            })
        };
        let mut explored = 0u64;
        let mut value = !stop;
        let chunk = if depth == 0 && self.limits.parallel {
            rayon_chunk()
        } else {
            1
        };
        for items in exts.chunks(chunk) {
            let results: Vec<Result<Outcome, LimitError>> = if chunk > 1 {
                par_map(items, &step)
            } else {
                items.iter().map(&step).collect()
            };
            let mut hit = false;
            for r in results {
                let o = r?;
                explored += 1 + o.explored;
                if o.value == stop {
                    value = stop;
                    hit = true;
                    break;
                }
            }
            if hit {
                break;
            }
        }
        let o = Outcome { value, explored };
        if let Some(memo) = &self.memo {
            memo.put(memo_key, o);
        }
        Ok(o)
    }
}

#[cfg(feature = "parallel")]
fn rayon_chunk() -> usize {
    4 * rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn rayon_chunk() -> usize {
    1
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, R: Send>(items: &[T], f: &(dyn Fn(&T) -> R + Sync)) -> Vec<R> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, R: Send>(items: &[T], f: &(dyn Fn(&T) -> R + Sync)) -> Vec<R> {
    items.iter().map(f).collect()
}
