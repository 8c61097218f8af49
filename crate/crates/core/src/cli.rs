//! The `hk` command line.
//!
//! Exit status: 0 on success (a decided sentence may be true or false),
//! 1 when a self-test criterion fails, 2 on usage and input errors, 3 when a
//! timeout or cap is hit, 4 on internal errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use crate::decide::{
    bound_check, bound_check_block, c_k, decide, quantifier_eliminate, sksat, t_block, t_rank,
    Algorithm, DecideError, Options, Verdict,
};
use crate::formula::{parse, Formula};
use crate::hset::{check_k, eval_bounded, parse_assignment, tcl_structure, HSet};
use crate::limits::{LimitError, Limits, DEFAULT_MAX_CLASSES, DEFAULT_MAX_NODES};
use crate::oracle::acceptance::{self, Level, Status};
use crate::oracle::DEFAULT_SEED;
use crate::structure::{enumerate, StructureError, TclStructure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "hk",
    version,
    about = "Decide sentences about hereditarily k-bounded sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a sentence in S_k.
    Decide {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = AlgoArg::Block)]
        algo: AlgoArg,
    },
    /// List the isomorphism classes of tcl^k_m(l)-structures.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        count_only: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a structure file against the tcl^k_m conditions.
    CheckStructure {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Replace a formula by an equivalent Boolean combination of bounded
    /// existential formulas.
    Qe {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate a formula on concrete sets, e.g. --assign "x={{}};y={}".
    Eval {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value = "")]
        assign: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print t_k(n) (and t_k(n, q)) with the tower comparison.
    Bounds {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the acceptance criteria.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u8>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct FormulaInput {
    #[arg(long)]
    k: usize,
    /// Formula text.
    #[arg(conflicts_with = "file", required_unless_present = "file")]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_CLASSES)]
    max_classes: usize,
    /// Cap every level at M. The answer is then not guaranteed.
    #[arg(long, value_name = "M")]
    unsound_m: Option<u64>,
    /// Print one line per scan to stderr.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include elapsed time in the output.
    #[arg(long)]
    timing: bool,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Block,
    Rank,
    K0,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        let code = match e {
            DecideError::Limit { .. } => EXIT_LIMIT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        let code = match e {
            StructureError::Limit(_) => EXIT_LIMIT,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LimitError> for Failure {
    fn from(e: LimitError) -> Self {
        Failure {
            code: EXIT_LIMIT,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn io_fail(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: format!("output error: {e}"),
    }
}

impl RunArgs {
    fn limits(&self) -> Result<Limits, Failure> {
        let mut limits = Limits {
            max_nodes: self.max_nodes,
            max_classes: self.max_classes,
            ..Limits::default()
        };
        if let Some(t) = self.timeout {
            let t = Duration::try_from_secs_f64(t)
                .map_err(|_| Failure::usage(format!("bad timeout {t}")))?;
            limits = limits.with_timeout(t);
        }
        Ok(limits.with_parallel(self.jobs.is_none_or(|j| j > 1)))
    }

    fn options(&self, algorithm: Algorithm) -> Result<Options, Failure> {
        let trace: Option<crate::decide::TraceSink> = self.trace.then(|| {
            Arc::new(|line: &str| {
                let mut err = std::io::stderr().lock();
                let _ = writeln!(err, "{line}");
            }) as crate::decide::TraceSink
        });
        Ok(Options {
            algorithm,
            limits: self.limits()?,
            unsound_m: self.unsound_m,
            trace,
            ..Options::default()
        })
    }
}

impl FormulaInput {
    fn formula(&self) -> Result<Formula, Failure> {
        let text = match (&self.formula, &self.file) {
            (Some(t), None) => t.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?,
            _ => return Err(Failure::usage("give either a formula or --file")),
        };
        parse(&text).map_err(|e| Failure::usage(e.to_string()))
    }
}

/// Runs the pool with `jobs` threads when asked; otherwise the global one.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs.filter(|&n| n > 1) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: format!("thread pool: {e}"),
            })?;
        return Ok(pool.install(f));
    }
    let _ = jobs;
    Ok(f())
}

fn print_verdict(
    out: &mut dyn Write,
    err: &mut dyn Write,
    v: &Verdict,
    run: &RunArgs,
) -> Result<(), Failure> {
    if run.format == Format::Json {
        writeln!(out, "{}", v.to_json(run.timing)).map_err(io_fail)?;
    } else {
        writeln!(out, "{}", v.value).map_err(io_fail)?;
        if run.timing {
            write!(err, "{}", v.to_text(true)).map_err(io_fail)?;
        }
    }
    if !v.sound {
        writeln!(
            err,
            "warning: level capped at {}; the answer is not guaranteed",
            v.m_used
        )
        .map_err(io_fail)?;
    }
    Ok(())
}

fn cmd_decide(
    input: &FormulaInput,
    run: &RunArgs,
    algo: AlgoArg,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let f = input.formula()?;
    let algorithm = match algo {
        AlgoArg::Block => Algorithm::Block,
        AlgoArg::Rank => Algorithm::Rank,
        AlgoArg::K0 => Algorithm::K0,
    };
    let opts = run.options(algorithm)?;
    let v = with_jobs(run.jobs, || decide(input.k, &f, &opts))??;
    print_verdict(out, err, &v, run)?;
    Ok(EXIT_OK)
}

fn cmd_enumerate(
    k: usize,
    m: u64,
    l: usize,
    count_only: bool,
    run: &RunArgs,
    out: &mut dyn Write,
) -> Outcome {
    let limits = run.limits()?;
    let all = with_jobs(run.jobs, || enumerate(k, m, l, &limits))??;
    if count_only {
        if run.format == Format::Json {
            writeln!(
                out,
                "{}",
                json!({"k": k, "m": m, "l": l, "count": all.len()})
            )
            .map_err(io_fail)?;
        } else {
            writeln!(out, "{}", all.len()).map_err(io_fail)?;
        }
        return Ok(EXIT_OK);
    }
    for s in &all {
        let line = match run.format {
            Format::Json => s.to_json(),
            Format::Text => text_structure(s),
        };
        writeln!(out, "{line}").map_err(io_fail)?;
    }
    Ok(EXIT_OK)
}

fn text_structure(s: &TclStructure) -> String {
    let edges: Vec<String> = s.edges().iter().map(|(u, v)| format!("{v}∈{u}")).collect();
    format!(
        "nodes={} tuple=({}) edges=[{}]",
        s.len(),
        s.tuple_names().join(","),
        edges.join(" ")
    )
}

fn cmd_check(k: usize, m: u64, file: &PathBuf, format: Format, out: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", file.display())))?;
    let s = TclStructure::from_json(&text)?;
    let valid = s.validate(k, m);
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            json!({"valid": valid, "nodes": s.len(), "tuple": s.tuple_len()})
        ),
        Format::Text => writeln!(out, "{valid}"),
    }
    .map_err(io_fail)?;
    Ok(EXIT_OK)
}

fn cmd_qe(input: &FormulaInput, run: &RunArgs, out: &mut dyn Write) -> Outcome {
    let f = input.formula()?;
    let opts = run.options(Algorithm::Rank)?;
    let g = with_jobs(run.jobs, || quantifier_eliminate(input.k, &f, &opts))??;
    match run.format {
        Format::Json => {
            let free: Vec<String> = f.free_vars().iter().map(|v| v.to_string()).collect();
            writeln!(
                out,
                "{}",
                json!({"formula": g.to_string(), "free": free, "quantifiers": g.quantifier_count()})
            )
        }
        Format::Text => writeln!(out, "{g}"),
    }
    .map_err(io_fail)?;
    Ok(EXIT_OK)
}

/// Bounded formulas are evaluated directly. Otherwise the truth value in
/// `H_k` is that of the closure of the assigned sets at level `t_k(rank)`.
fn cmd_eval(
    input: &FormulaInput,
    assign: &str,
    run: &RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let f = input.formula()?;
    let assignment =
        parse_assignment(assign).map_err(|e| Failure::usage(format!("bad assignment: {e}")))?;
    if let Some((v, _)) = assignment.iter().find(|(_, s)| !check_k(s, input.k)) {
        return Err(Failure::usage(format!(
            "the value of `{v}` is not in H_{}",
            input.k
        )));
    }
    if let Some(v) = f
        .free_vars()
        .into_iter()
        .find(|v| !assignment.iter().any(|(a, _)| a == v))
    {
        return Err(Failure::usage(format!(
            "free variable `{v}` is not assigned"
        )));
    }
    if f.is_bounded() {
        let value = eval_bounded(&f, &assignment).map_err(|e| Failure::usage(e.to_string()))?;
        match run.format {
            Format::Json => writeln!(out, "{}", json!({"value": value, "method": "direct"})),
            Format::Text => writeln!(out, "{value}"),
        }
        .map_err(io_fail)?;
        return Ok(EXIT_OK);
    }
    let opts = run.options(Algorithm::Rank)?;
    let k = input.k;
    let level = t_rank(k as u64, u64::from(f.desugar_bounded().rank()))?;
    let m = match (u64::try_from(level.clone()), run.unsound_m) {
        (Ok(m), cap) => cap.map_or(m, |c| m.min(c)),
        (Err(_), Some(c)) => c,
        (Err(_), None) => return Err(LimitError::BoundTooLarge(format!("level {level}")).into()),
    };
    let vars: Vec<_> = assignment.iter().map(|(v, _)| v.clone()).collect();
    let values: Vec<HSet> = assignment.iter().map(|(_, s)| s.clone()).collect();
    let s = tcl_structure(&values, m);
    let v = with_jobs(run.jobs, || sksat(&s, m, &f, &vars, k, &opts))??;
    print_verdict(out, err, &v, run)?;
    Ok(EXIT_OK)
}

fn cmd_bounds(k: u64, n: u64, q: Option<u64>, format: Format, out: &mut dyn Write) -> Outcome {
    let t = t_rank(k, n)?;
    let tq = q.map(|q| t_block(k, n, q)).transpose()?;
    // The tower comparisons need k ≥ 2 and n ≥ 1.
    let comparable = k >= 2 && n >= 1;
    let rank_cmp = comparable.then(|| bound_check(k, n)).transpose()?;
    let block_cmp = match q {
        Some(q) if comparable && q >= 1 => Some(bound_check_block(k, n, q)?),
        _ => None,
    };
    let ck = (k >= 2).then(|| c_k(k));
    if format == Format::Json {
        let mut obj = json!({"k": k, "n": n, "t_rank": t.to_string()});
        if let Some(ck) = ck {
            obj["c_k"] = json!(ck);
        }
        if let Some(ok) = rank_cmp {
            obj["rank_bound_holds"] = json!(ok);
        }
        if let (Some(q), Some(tq)) = (q, &tq) {
            obj["q"] = json!(q);
            obj["t_block"] = json!(tq.to_string());
        }
        if let Some(ok) = block_cmp {
            obj["block_bound_holds"] = json!(ok);
        }
        writeln!(out, "{obj}").map_err(io_fail)?;
        return Ok(EXIT_OK);
    }
    let mut lines = vec![format!("t_rank={}", short(&t))];
    match (ck, rank_cmp) {
        (Some(ck), Some(ok)) => lines.push(format!(
            "t_{k}({n}) <= 2^{{c_k}}_{} with c_k={ck}: {ok}",
            n - 1
        )),
        _ => lines.push("comparison: needs k >= 2 and n >= 1".to_string()),
    }
    if let (Some(q), Some(tq)) = (q, &tq) {
        lines.push(format!("t_block={} (q={q})", short(tq)));
        if let Some(ok) = block_cmp {
            lines.push(format!(
                "t_{k}({n},{q}) <= 2^{{4qk log k}}_{} with exponent {}: {ok}",
                n - 1,
                crate::decide::bounds::block_exponent(k, q)
            ));
        }
    }
    for line in lines {
        writeln!(out, "{line}").map_err(io_fail)?;
    }
    Ok(EXIT_OK)
}

/// Very long numbers are shown by their bit length.
fn short(x: &BigUint) -> String {
    if x.bits() <= 256 {
        x.to_string()
    } else {
        format!("<{}-bit number>", x.bits())
    }
}

fn cmd_selftest(
    level: LevelArg,
    seed: u64,
    criterion: Option<u8>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let ids: Vec<u8> = match criterion {
        Some(id) if (1..=acceptance::CRITERIA.len() as u8).contains(&id) => vec![id],
        Some(id) => return Err(Failure::usage(format!("no criterion {id}"))),
        None => acceptance::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let mut failed = false;
    for id in ids {
        let o = acceptance::run(id, level, seed);
        failed |= o.status == Status::Fail;
        match format {
            Format::Json => writeln!(
                out,
                "{}",
                serde_json::to_string(&o).expect("outcome serializes")
            ),
            Format::Text => writeln!(out, "{o}"),
        }
        .map_err(io_fail)?;
    }
    Ok(if failed { EXIT_FAILED } else { EXIT_OK })
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Decide { input, run, algo } => cmd_decide(input, run, *algo, out, err),
        Command::Enumerate {
            k,
            m,
            l,
            count_only,
            run,
        } => cmd_enumerate(*k, *m, *l, *count_only, run, out),
        Command::CheckStructure { k, m, file, format } => cmd_check(*k, *m, file, *format, out),
        Command::Qe { input, run } => cmd_qe(input, run, out),
        Command::Eval { input, assign, run } => cmd_eval(input, assign, run, out, err),
        Command::Bounds { k, n, q, format } => cmd_bounds(*k, *n, *q, *format, out),
        Command::Selftest {
            level,
            seed,
            criterion,
            format,
        } => cmd_selftest(*level, *seed, *criterion, *format, out),
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli, out, err)));
    match result {
        Ok(Ok(code)) => code,
        Ok(Err(f)) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal failure");
            EXIT_INTERNAL
        }
    }
}
