//! Decision procedure for the theory of sets hereditarily of size at most `k`.

pub mod cli;
pub mod decide;
pub mod formula;
pub mod hset;
pub mod limits;
pub mod oracle;
pub mod structure;
