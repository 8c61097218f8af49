//! Resource caps shared by enumeration and the decision procedures.

use std::time::{Duration, Instant};

use thiserror::Error;

pub const DEFAULT_MAX_NODES: u64 = 64;
pub const DEFAULT_MAX_CLASSES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("node bound {bound} exceeds the cap of {cap}")]
    NodeCap { bound: String, cap: u64 },
    #[error("more than {cap} structures in one enumeration")]
    ClassCap { cap: usize },
    #[error("timed out")]
    Timeout,
    #[error("bound too large to materialize: {0}")]
    BoundTooLarge(String),
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_nodes: u64,
    pub max_classes: usize,
    pub deadline: Option<Instant>,
    /// Use the rayon pool where the caller allows it.
    pub parallel: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: DEFAULT_MAX_NODES,
            max_classes: DEFAULT_MAX_CLASSES,
            deadline: None,
            parallel: false,
        }
    }
}

impl Limits {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel && cfg!(feature = "parallel");
        self
    }

    pub fn check_deadline(&self) -> Result<(), LimitError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(LimitError::Timeout),
            _ => Ok(()),
        }
    }
}
