//! The line protocol spoken by competition solvers: `c` comments, `o`
//! improving bounds, one `s` status, then an optional `v` solution line.

use thiserror::Error;

use crate::engine::Status;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reported {
    Satisfiable,
    Unsatisfiable,
    OptimumFound,
    Unknown,
}

impl Reported {
    pub fn line(self) -> &'static str {
        match self {
            Reported::Satisfiable => "s SATISFIABLE",
            Reported::Unsatisfiable => "s UNSATISFIABLE",
            Reported::OptimumFound => "s OPTIMUM FOUND",
            Reported::Unknown => "s UNKNOWN",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, Reported::Satisfiable | Reported::OptimumFound)
    }
}

impl From<Status> for Reported {
    fn from(s: Status) -> Reported {
        match s {
            Status::Sat => Reported::Satisfiable,
            Status::Unsat => Reported::Unsatisfiable,
            Status::Optimum => Reported::OptimumFound,
            Status::Unknown => Reported::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolverOutput {
    pub comments: Vec<String>,
    pub bounds: Vec<i64>,
    pub status: Option<Reported>,
    /// The `<instantiation>` text of the `v` line.
    pub solution: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("protocol violation at line {line}: {message}")]
pub struct ProtocolError {
    /// 1-based.
    pub line: usize,
    pub message: String,
}

/// Parses solver output. Blank lines are ignored.
pub fn parse_output(text: &str) -> Result<SolverOutput, ProtocolError> {
    let mut out = SolverOutput::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        let err = |message: String| ProtocolError {
            line: i + 1,
            message,
        };
        if line.trim().is_empty() {
            continue;
        }
        let (tag, rest) = match line.split_once(' ') {
            Some((t, r)) => (t, r.trim()),
            None => (line, ""),
        };
        match tag {
            "c" => out.comments.push(rest.to_string()),
            "o" => {
                if out.status.is_some() {
                    return Err(err("`o` after the status line".into()));
                }
                let b = rest
                    .parse::<i64>()
                    .map_err(|_| err(format!("bad bound `{rest}`")))?;
                out.bounds.push(b);
            }
            "s" => {
                if out.status.is_some() {
                    return Err(err("second status line".into()));
                }
                out.status = Some(match rest {
                    "SATISFIABLE" => Reported::Satisfiable,
                    "UNSATISFIABLE" => Reported::Unsatisfiable,
                    "OPTIMUM FOUND" => Reported::OptimumFound,
                    "UNKNOWN" => Reported::Unknown,
                    other => return Err(err(format!("unknown status `{other}`"))),
                });
            }
            "v" => {
                if !out.status.is_some_and(Reported::has_solution) {
                    return Err(err("`v` without a satisfiable status".into()));
                }
                if out.solution.is_some() {
                    return Err(err("second `v` line".into()));
                }
                out.solution = Some(rest.to_string());
            }
            other => return Err(err(format!("unknown line type `{other}`"))),
        }
    }
    Ok(out)
}
