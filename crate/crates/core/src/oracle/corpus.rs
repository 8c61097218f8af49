//! Seeded random sentences, formulas, and concrete sets.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{prenex, Formula, Var};
use crate::hset::HSet;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_rank: u32,
    /// Total quantifiers per formula, bounded ones included.
    pub max_quantifiers: usize,
    pub max_depth: u32,
    /// Rejects sentences whose prenex form has more quantifiers than this;
    /// `↔` between quantified parts doubles them.
    pub max_prenex_quantifiers: Option<usize>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: DEFAULT_SEED,
            count: 200,
            max_rank: 2,
            max_quantifiers: 3,
            max_depth: 5,
            max_prenex_quantifiers: Some(3),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    quantifiers_left: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn atom(&mut self, env: &[Var]) -> Formula {
        let x = env.choose(self.rng).unwrap().clone();
        let y = env.choose(self.rng).unwrap().clone();
        if self.rng.gen_bool(0.6) {
            Formula::mem(x, y)
        } else {
            Formula::eq(x, y)
        }
    }

    fn quantifier(&mut self, env: &mut Vec<Var>, depth: u32, rank: u32) -> Formula {
        self.quantifiers_left -= 1;
        let v = Var::new(&format!("v{}", env.len()));
        let bound = (!env.is_empty() && self.rng.gen_bool(0.2))
            .then(|| env.choose(self.rng).unwrap().clone());
        let exists = self.rng.gen_bool(0.5);
        env.push(v.clone());
        let body = self.formula(env, depth.saturating_sub(1), rank - 1);
        env.pop();
        match (bound, exists) {
            (Some(x), true) => Formula::bounded_exists(v, x, body),
            (Some(x), false) => Formula::bounded_forall(v, x, body),
            (None, true) => Formula::exists(v, body),
            (None, false) => Formula::forall(v, body),
        }
    }

    fn formula(&mut self, env: &mut Vec<Var>, depth: u32, rank: u32) -> Formula {
        let can_quantify = rank > 0 && self.quantifiers_left > 0;
        if env.is_empty() {
            if !can_quantify {
                return Formula::Const(self.rng.gen_bool(0.5));
            }
            if depth > 0 && self.rng.gen_bool(0.25) {
                return self.connective(env, depth, rank);
            }
            return self.quantifier(env, depth, rank);
        }
        if depth == 0 {
            return self.atom(env);
        }
        match self.rng.gen_range(0..10) {
            0..=2 => self.atom(env),
            3..=5 if can_quantify => self.quantifier(env, depth, rank),
            3..=5 => self.atom(env),
            _ => self.connective(env, depth, rank),
        }
    }

    fn connective(&mut self, env: &mut Vec<Var>, depth: u32, rank: u32) -> Formula {
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => Formula::not(self.formula(env, d, rank)),
            i => {
                let a = self.formula(env, d, rank);
                let b = self.formula(env, d, rank);
                match i {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    3 => Formula::implies(a, b),
                    _ => Formula::iff(a, b),
                }
            }
        }
    }
}

/// A random formula whose free variables are among `free`.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    free: &[Var],
    max_rank: u32,
    max_quantifiers: usize,
    max_depth: u32,
) -> Formula {
    let mut gen = Gen {
        rng,
        quantifiers_left: max_quantifiers,
    };
    let mut env = free.to_vec();
    gen.formula(&mut env, max_depth, max_rank)
}

/// `cfg.count` random sentences, reproducible from `cfg.seed`.
pub fn random_sentences(cfg: &CorpusConfig) -> Vec<Formula> {
    let mut r = rng(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    while out.len() < cfg.count {
        let f = random_formula(
            &mut r,
            &[],
            cfg.max_rank,
            cfg.max_quantifiers,
            cfg.max_depth,
        );
        if cfg
            .max_prenex_quantifiers
            .is_none_or(|q| prenex(&f).quantifier_count() <= q)
        {
            out.push(f);
        }
    }
    out
}

/// A random element of `H_k` of rank at most `height`.
pub fn random_set<R: Rng>(rng: &mut R, k: usize, height: usize) -> HSet {
    if k == 1 {
        return HSet::tower(rng.gen_range(0..=height));
    }
    if height == 0 {
        return HSet::empty();
    }
    let size = rng.gen_range(0..=k);
    let children = (0..size).map(|_| random_set(rng, k, height - 1)).collect();
    HSet::from_children(children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hset::check_k;

    #[test]
    fn corpus_respects_caps() {
        let cfg = CorpusConfig::default();
        let corpus = random_sentences(&cfg);
        assert_eq!(corpus.len(), 200);
        for f in &corpus {
            assert!(f.is_sentence());
            assert!(f.rank() <= 2);
            assert!(f.quantifier_count() <= 3);
            assert!(prenex(f).quantifier_count() <= 3);
        }
        assert_eq!(corpus, random_sentences(&cfg));
        assert!(corpus.iter().filter(|f| f.rank() == 2).count() > 20);
    }

    #[test]
    fn sets_are_bounded() {
        let mut r = rng(1);
        for k in 0..4 {
            for _ in 0..50 {
                assert!(check_k(&random_set(&mut r, k, 3), k));
            }
        }
    }
}
