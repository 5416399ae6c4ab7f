use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunStatus {
    Sat,
    Unsat,
    Optimum,
    Unknown,
    /// Set by the verifier when a claimed solution fails; never reported by
    /// a solver.
    Invalid,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Sat => "SAT",
            RunStatus::Unsat => "UNSAT",
            RunStatus::Optimum => "OPTIMUM",
            RunStatus::Unknown => "UNKNOWN",
            RunStatus::Invalid => "INVALID",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunStatus {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<RunStatus, RecordError> {
        Ok(match s.trim() {
            "SAT" => RunStatus::Sat,
            "UNSAT" => RunStatus::Unsat,
            "OPTIMUM" => RunStatus::Optimum,
            "UNKNOWN" => RunStatus::Unknown,
            "INVALID" => RunStatus::Invalid,
            other => return Err(RecordError::BadStatus(other.to_string())),
        })
    }
}

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub solver: String,
    pub status: RunStatus,
    pub bound: Option<i64>,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown status `{0}`")]
    BadStatus(String),
}

#[derive(Serialize, Deserialize)]
struct Row {
    instance: String,
    solver: String,
    status: String,
    bound: Option<i64>,
    elapsed_s: String,
}

/// Writes records with header `instance,solver,status,bound,elapsed_s`.
pub fn write_records<W: io::Write>(out: W, records: &[RunRecord]) -> Result<(), RecordError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(Row {
            instance: r.instance.clone(),
            solver: r.solver.clone(),
            status: r.status.name().to_string(),
            bound: r.bound,
            elapsed_s: format!("{:.3}", r.elapsed),
        })?;
    }
    if records.is_empty() {
        w.write_record(["instance", "solver", "status", "bound", "elapsed_s"])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_records<R: io::Read>(input: R) -> Result<Vec<RunRecord>, RecordError> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        let row: Row = row?;
        let elapsed = row.elapsed_s.parse::<f64>().map_err(|_| {
            RecordError::Csv(csv::Error::from(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("bad elapsed_s `{}`", row.elapsed_s),
            )))
        })?;
        out.push(RunRecord {
            instance: row.instance,
            solver: row.solver,
            status: row.status.parse()?,
            bound: row.bound,
            elapsed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let records = vec![
            RunRecord {
                instance: "dubois-3".into(),
                solver: "xcsp-mini".into(),
                status: RunStatus::Unsat,
                bound: None,
                elapsed: 0.0123,
            },
            RunRecord {
                instance: "knapsack".into(),
                solver: "xcsp-mini".into(),
                status: RunStatus::Optimum,
                bound: Some(283),
                elapsed: 1.5,
            },
        ];
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "instance,solver,status,bound,elapsed_s\n\
             dubois-3,xcsp-mini,UNSAT,,0.012\n\
             knapsack,xcsp-mini,OPTIMUM,283,1.500\n"
        );
        let back = read_records(text.as_bytes()).unwrap();
        assert_eq!(back[1], records[1]);
        assert_eq!(back[0].elapsed, 0.012);
    }

    #[test]
    fn empty_table_keeps_header() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(buf, b"instance,solver,status,bound,elapsed_s\n");
        assert!(read_records(&buf[..]).unwrap().is_empty());
    }
}
