//! Naive reference implementations used to check the optimized machinery.

pub mod acceptance;
mod axioms;
mod brute;
mod corpus;
mod differential;
mod k0;
mod window;

pub use axioms::{
    at_least, axiom_suite, b_k, block_feasible, c_n, desk_node_cap, extensionality, foundation,
    v_n, Axiom,
};
pub use brute::{brute_enumerate, MAX_BRUTE_NODES};
pub use corpus::{random_formula, random_sentences, random_set, rng, CorpusConfig, DEFAULT_SEED};
pub use differential::{differential, CaseReport, OracleReport};
pub use k0::eval_k0;
pub use window::{eval_h1, eval_in_windows, universe};
