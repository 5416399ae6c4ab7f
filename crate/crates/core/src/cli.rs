//! The `xcsp-mini` command line: solve, generate, verify and rank.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{
    enumerate_with, optimize, solve, SearchConfig, SolveOutcome, Status, VarHeuristic,
};
use crate::generators::{gen_catalog, payload_from_params, Omit, ProblemData, ProblemId};
use crate::harness::{
    read_records, score_track_with, verify, Mode, RankBy, Reported, RunStatus,
};
use crate::model::{Instance, Kind};
use crate::xcsp::{parse_instance, parse_solution_for, write_instance, write_solution};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_OPTIMUM: i32 = 30;
pub const EXIT_UNKNOWN: i32 = 0;
pub const EXIT_USAGE: i32 = 2;

/// Verbosity of `c` lines, from `XCSP_MINI_LOG`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LogLevel {
    Quiet,
    Info,
    Debug,
}

impl LogLevel {
    pub fn from_env() -> LogLevel {
        match std::env::var("XCSP_MINI_LOG").as_deref() {
            Ok("quiet") => LogLevel::Quiet,
            Ok("debug") => LogLevel::Debug,
            _ => LogLevel::Info,
        }
    }
}

#[derive(Parser)]
#[command(name = "xcsp-mini", version, about = "XCSP3-core instances: solve, generate, verify, rank")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance, printing the competition output protocol.
    Solve(SolveArgs),
    /// Write a catalog problem as XCSP3 XML.
    Generate(GenerateArgs),
    /// Check a solution against an instance.
    Verify(VerifyArgs),
    /// Rank solvers from a results CSV.
    Rank(RankArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Heuristic {
    DomWdeg,
    Lex,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 2400.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restarts: bool,
    #[arg(long, value_enum, default_value = "dom-wdeg")]
    heuristic: Heuristic,
    /// Count all solutions (CSP only).
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct GenerateArgs {
    problem: String,
    #[arg(long)]
    variant: Option<String>,
    /// Integer parameter `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// JSON payload file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Blocks to leave out, among sym, red and dv.
    #[arg(long = "no-tags", value_name = "TAGS")]
    no_tags: Option<String>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Claimed objective value; defaults to the solution's cost attribute.
    #[arg(long)]
    bound: Option<i64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Csp,
    Cop,
}

#[derive(Clone, Copy, ValueEnum)]
enum ByArg {
    Solved,
    Best,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct RankArgs {
    results: PathBuf,
    /// Track size; defaults to the distinct instances in the file.
    #[arg(long)]
    instances: Option<usize>,
    /// Defaults to cop when any record carries a bound or an optimum.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "solved")]
    by: ByArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Runs the command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let log = LogLevel::from_env();
    let result = match cli.command {
        Cmd::Solve(a) => cmd_solve(a, log, out),
        Cmd::Generate(a) => cmd_generate(a, out),
        Cmd::Verify(a) => cmd_verify(a, out),
        Cmd::Rank(a) => cmd_rank(a, out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn exit_code(status: Status) -> i32 {
    match status {
        Status::Sat => EXIT_SAT,
        Status::Unsat => EXIT_UNSAT,
        Status::Optimum => EXIT_OPTIMUM,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn cmd_solve(a: SolveArgs, log: LogLevel, out: &mut dyn Write) -> Result<i32, Failure> {
    if !(a.timeout.is_finite() && a.timeout > 0.0) {
        return Err(Failure("--timeout must be a positive number of seconds".into()));
    }
    let instance = load(&a.instance)?;
    let config = SearchConfig {
        time_limit: Duration::from_secs_f64(a.timeout),
        seed: a.seed,
        restarts: a.restarts,
        var_heuristic: match a.heuristic {
            Heuristic::DomWdeg => VarHeuristic::DomWdeg,
            Heuristic::Lex => VarHeuristic::Lex,
        },
        ..SearchConfig::default()
    };
    let c = |out: &mut dyn Write, level: LogLevel, text: String| {
        if log >= level {
            let _ = writeln!(out, "c {text}");
        }
    };
    c(
        out,
        LogLevel::Info,
        format!(
            "{}: {} {} variables, {} constraints",
            a.instance.display(),
            instance.kind.name(),
            instance.variables.len(),
            instance.constraints.len()
        ),
    );
    c(out, LogLevel::Debug, format!("{config:?}"));

    if a.all {
        if instance.kind != Kind::Csp {
            return Err(Failure("--all needs a CSP instance".into()));
        }
        let e = enumerate_with(&instance, u64::MAX, &config)?;
        c(out, LogLevel::Info, format!("{} solutions{}", e.count, if e.complete { "" } else { " (incomplete)" }));
        let (status, code) = match (e.count, e.complete) {
            (0, true) => (Reported::Unsatisfiable, EXIT_UNSAT),
            (0, false) => (Reported::Unknown, EXIT_UNKNOWN),
            _ => (Reported::Satisfiable, EXIT_SAT),
        };
        writeln!(out, "{}", status.line())?;
        return Ok(code);
    }

    let outcome: SolveOutcome = match instance.kind {
        Kind::Csp => solve(&instance, &config)?,
        Kind::Cop => optimize(&instance, &config, |bound, _| {
            let _ = writeln!(out, "o {bound}");
            let _ = out.flush();
        })?,
    };
    let st = &outcome.stats;
    c(
        out,
        LogLevel::Info,
        format!(
            "nodes {} failures {} propagations {} time {:.3}s",
            st.nodes,
            st.failures,
            st.propagations,
            st.elapsed.as_secs_f64()
        ),
    );
    if st.rejected_leaves > 0 {
        c(out, LogLevel::Debug, format!("rejected leaves {}", st.rejected_leaves));
    }
    let reported = Reported::from(outcome.status);
    writeln!(out, "{}", reported.line())?;
    if let (true, Some(w)) = (reported.has_solution(), &outcome.witness) {
        writeln!(out, "v {}", write_solution(&instance, w, outcome.bound))?;
    }
    Ok(exit_code(outcome.status))
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let problem: ProblemId = a.problem.parse()?;
    let mut payload = match &a.data {
        Some(path) => serde_json::from_str(&read(path)?)
            .map_err(|e| Failure(format!("{}: {e}", path.display())))?,
        None => serde_json::Value::Object(Default::default()),
    };
    let mut params = Vec::new();
    for p in &a.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Failure(format!("--param expects key=value, got `{p}`")))?;
        let v: i64 = v
            .trim()
            .parse()
            .map_err(|_| Failure(format!("--param {k}: `{v}` is not an integer")))?;
        params.push((k.trim(), v));
    }
    if let (serde_json::Value::Object(map), serde_json::Value::Object(extra)) =
        (&mut payload, payload_from_params(params))
    {
        map.extend(extra);
    } else if !a.params.is_empty() {
        return Err(Failure("--param needs an object payload".into()));
    }
    let omit: Omit = a.no_tags.as_deref().unwrap_or("").parse()?;
    let mut data = ProblemData::new(problem, payload).with_omit(omit);
    if let Some(v) = a.variant {
        data = data.with_variant(v);
    }
    let xml = write_instance(&gen_catalog(&data)?)?;
    match &a.output {
        Some(path) => std::fs::write(path, xml).map_err(|e| Failure(format!("{}: {e}", path.display())))?,
        None => out.write_all(xml.as_bytes())?,
    }
    Ok(0)
}

/// The `cost` attribute of an `<instantiation>`, if any.
fn cost_attribute(text: &str) -> Option<i64> {
    let doc = roxmltree::Document::parse(text).ok()?;
    doc.root_element().attribute("cost")?.trim().parse().ok()
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = load(&a.instance)?;
    let text = read(&a.solution)?;
    let assignment = parse_solution_for(&text, &instance)
        .map_err(|e| Failure(format!("{}: {e}", a.solution.display())))?;
    let verdict = verify(&instance, &assignment, a.bound.or_else(|| cost_attribute(&text)));
    writeln!(out, "{verdict}")?;
    Ok(if verdict.is_valid() { 0 } else { 1 })
}

fn cmd_rank(a: RankArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let file = std::fs::File::open(&a.results)
        .map_err(|e| Failure(format!("{}: {e}", a.results.display())))?;
    let records = read_records(file)?;
    let n = a.instances.unwrap_or_else(|| {
        let ids: std::collections::BTreeSet<&str> =
            records.iter().map(|r| r.instance.as_str()).collect();
        ids.len()
    });
    let mode = match a.mode {
        Some(ModeArg::Csp) => Mode::Csp,
        Some(ModeArg::Cop) => Mode::Cop,
        None if records
            .iter()
            .any(|r| r.bound.is_some() || r.status == RunStatus::Optimum) =>
        {
            Mode::Cop
        }
        None => Mode::Csp,
    };
    let by = match a.by {
        ByArg::Solved => RankBy::Solved,
        ByArg::Best => RankBy::BestKnown,
    };
    let ranking = score_track_with(&records, n, mode, by, &Default::default())?;
    match a.format {
        Format::Text => out.write_all(ranking.to_text().as_bytes())?,
        Format::Csv => out.write_all(ranking.to_csv().as_bytes())?,
    }
    Ok(0)
}
