//! Runs both decision algorithms (and, at `k = 0`, the propositional
//! evaluator) on a corpus and records where they disagree.

use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use super::eval_k0;
use crate::decide::{decide, Algorithm, Options};
use crate::formula::Formula;

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub case: usize,
    pub k: usize,
    pub sentence: String,
    /// Reference value and where it came from.
    pub expected: Option<bool>,
    pub source: &'static str,
    pub actual: Option<bool>,
    /// `None` when fewer than two methods finished.
    pub agree: Option<bool>,
    pub ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub cases: Vec<CaseReport>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.disagreements() == 0
    }

    pub fn disagreements(&self) -> usize {
        self.cases.iter().filter(|c| c.agree == Some(false)).count()
    }

    pub fn incomplete(&self) -> usize {
        self.cases.iter().filter(|c| c.agree.is_none()).count()
    }

    /// One JSON object per line, in case order.
    pub fn to_json_lines(&self) -> String {
        self.cases
            .iter()
            .map(|c| serde_json::to_string(c).expect("report serializes") + "\n")
            .collect()
    }
}

fn run_case(
    case: usize,
    k: usize,
    f: &Formula,
    opts: &Options,
    per_case: Option<Duration>,
) -> CaseReport {
    let started = Instant::now();
    let with = |algorithm| {
        let mut o = Options {
            algorithm,
            ..opts.clone()
        };
        if let Some(t) = per_case {
            o.limits = o.limits.with_timeout(t);
        }
        decide(k, f, &o)
    };
    let rank = with(Algorithm::Rank);
    let block = with(Algorithm::Block);
    let mut notes = Vec::new();
    let mut values = Vec::new();
    let (expected, source) = if k == 0 {
        let v = eval_k0(&f.desugar_bounded());
        values.push(v);
        (Some(v), "k0")
    } else {
        (rank.as_ref().ok().map(|v| v.value), "rank")
    };
    match &rank {
        Ok(v) => values.push(v.value),
        Err(e) => notes.push(format!("rank: {e}")),
    }
    let actual = match &block {
        Ok(v) => {
            values.push(v.value);
            Some(v.value)
        }
        Err(e) => {
            notes.push(format!("block: {e}"));
            None
        }
    };
    let agree = (values.len() >= 2).then(|| values.iter().all(|&v| v == values[0]));
    CaseReport {
        case,
        k,
        sentence: f.to_string(),
        expected,
        source,
        actual,
        agree,
        ms: started.elapsed().as_millis() as u64,
        note: (!notes.is_empty()).then(|| notes.join("; ")),
    }
}

/// Cases run on the rayon pool when `opts.limits.parallel` is set; the
/// report is in corpus order either way.
pub fn differential(
    k: usize,
    corpus: &[Formula],
    opts: &Options,
    per_case: Option<Duration>,
) -> OracleReport {
    let inner = Options {
        limits: opts.limits.with_parallel(false),
        ..opts.clone()
    };
    let run = |(i, f): (usize, &Formula)| run_case(i, k, f, &inner, per_case);
    #[cfg(feature = "parallel")]
    let cases = if opts.limits.parallel {
        corpus.par_iter().enumerate().map(run).collect()
    } else {
        corpus.iter().enumerate().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cases = corpus.iter().enumerate().map(run).collect();
    OracleReport { cases }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn self_membership_is_refuted_everywhere() {
        let corpus = vec![parse("exists x. x in x").unwrap()];
        for k in 0..=2 {
            let r = differential(k, &corpus, &Options::default(), None);
            assert!(r.passed());
            assert_eq!(r.cases[0].actual, Some(false));
            assert_eq!(r.cases[0].expected, Some(false));
        }
    }

    #[test]
    fn json_lines() {
        let corpus = vec![
            parse("forall x. x = x").unwrap(),
            parse("exists x. x in x").unwrap(),
        ];
        let r = differential(1, &corpus, &Options::default(), None);
        let text = r.to_json_lines();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("{\"case\":0,\"k\":1,"));
    }
}
