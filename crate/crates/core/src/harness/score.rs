use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::record::{RunRecord, RunStatus};
use crate::model::Sense;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Csp,
    Cop,
}

impl FromStr for Mode {
    type Err = ScoreError;

    fn from_str(s: &str) -> Result<Mode, ScoreError> {
        match s.to_ascii_lowercase().as_str() {
            "csp" => Ok(Mode::Csp),
            "cop" => Ok(Mode::Cop),
            _ => Err(ScoreError::UnknownMode(s.to_string())),
        }
    }
}

/// What a track ranks by. `BestKnown` is the fast COP track, where only
/// the best-known count matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankBy {
    #[default]
    Solved,
    BestKnown,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("two records for solver `{solver}` on instance `{instance}`")]
    DuplicateRecord { instance: String, solver: String },
    #[error("unknown mode `{0}` (expected csp or cop)")]
    UnknownMode(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingRow {
    pub solver: String,
    /// SAT or UNSAT for CSP, OPTIMUM for COP.
    pub solved: usize,
    pub sat: usize,
    pub unsat: usize,
    pub optimum: usize,
    /// COP only: instances where the bound ties the best over all solvers.
    pub best_known: Option<usize>,
    pub pct_instances: u32,
    pub pct_vbs: u32,
    /// Seconds summed over proved instances; breaks ties.
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub mode: Mode,
    pub rank_by: RankBy,
    pub n_instances: usize,
    /// Virtual best solver: the union of proved instances (of instances
    /// with a best-known bound when ranking by best known).
    pub vbs: RankingRow,
    pub rows: Vec<RankingRow>,
}

/// `100 * part / whole` rounded half up; 0 when `whole` is 0.
pub fn percent(part: usize, whole: usize) -> u32 {
    if whole == 0 {
        return 0;
    }
    ((200 * part + whole) / (2 * whole)) as u32
}

/// Per-instance objective sense, used to find best bounds; an instance
/// without an entry is taken as minimization.
pub type Senses = HashMap<String, Sense>;

pub fn score_track(
    records: &[RunRecord],
    n_instances: usize,
    mode: Mode,
) -> Result<Ranking, ScoreError> {
    score_track_with(records, n_instances, mode, RankBy::Solved, &Senses::new())
}

pub fn score_track_with(
    records: &[RunRecord],
    n_instances: usize,
    mode: Mode,
    rank_by: RankBy,
    senses: &Senses,
) -> Result<Ranking, ScoreError> {
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert((r.instance.as_str(), r.solver.as_str())) {
            return Err(ScoreError::DuplicateRecord {
                instance: r.instance.clone(),
                solver: r.solver.clone(),
            });
        }
    }
    let proved = |r: &RunRecord| match mode {
        Mode::Csp => matches!(r.status, RunStatus::Sat | RunStatus::Unsat),
        Mode::Cop => r.status == RunStatus::Optimum,
    };
    let has_bound = |r: &RunRecord| {
        matches!(r.status, RunStatus::Sat | RunStatus::Optimum) && r.bound.is_some()
    };

    // best bound per instance; a proved optimum wins outright
    let mut best: HashMap<&str, i64> = HashMap::new();
    if mode == Mode::Cop {
        for r in records.iter().filter(|r| has_bound(r)) {
            let b = r.bound.expect("has bound");
            let sense = senses.get(&r.instance).copied().unwrap_or(Sense::Minimize);
            best.entry(&r.instance)
                .and_modify(|cur| {
                    if sense.improves(b, *cur) {
                        *cur = b
                    }
                })
                .or_insert(b);
        }
        for r in records.iter().filter(|r| r.status == RunStatus::Optimum) {
            if let Some(b) = r.bound {
                best.insert(&r.instance, b);
            }
        }
    }

    let mut per: BTreeMap<&str, RankingRow> = BTreeMap::new();
    let mut vbs_proved: BTreeMap<&str, RunStatus> = BTreeMap::new();
    for r in records {
        let row = per.entry(&r.solver).or_insert_with(|| RankingRow {
            solver: r.solver.clone(),
            solved: 0,
            sat: 0,
            unsat: 0,
            optimum: 0,
            best_known: (mode == Mode::Cop).then_some(0),
            pct_instances: 0,
            pct_vbs: 0,
            time: 0.0,
        });
        if proved(r) {
            row.solved += 1;
            row.time += r.elapsed;
            match r.status {
                RunStatus::Sat => row.sat += 1,
                RunStatus::Unsat => row.unsat += 1,
                _ => row.optimum += 1,
            }
            vbs_proved.entry(&r.instance).or_insert(r.status);
        }
        if has_bound(r) && best.get(r.instance.as_str()) == r.bound.as_ref() {
            *row.best_known.as_mut().expect("COP row") += 1;
        }
    }

    let mut vbs = RankingRow {
        solver: "VBS".to_string(),
        solved: vbs_proved.len(),
        sat: vbs_proved.values().filter(|s| **s == RunStatus::Sat).count(),
        unsat: vbs_proved.values().filter(|s| **s == RunStatus::Unsat).count(),
        optimum: vbs_proved.values().filter(|s| **s == RunStatus::Optimum).count(),
        best_known: (mode == Mode::Cop).then_some(best.len()),
        pct_instances: 0,
        pct_vbs: 100,
        time: 0.0,
    };
    let key = |row: &RankingRow| match rank_by {
        RankBy::Solved => row.solved,
        RankBy::BestKnown => row.best_known.unwrap_or(0),
    };
    let vbs_count = key(&vbs);
    vbs.pct_instances = percent(vbs_count, n_instances);
    vbs.pct_vbs = if vbs_count == 0 { 0 } else { 100 };

    let mut rows: Vec<RankingRow> = per.into_values().collect();
    for row in &mut rows {
        row.pct_instances = percent(key(row), n_instances);
        row.pct_vbs = percent(key(row), vbs_count);
    }
    rows.sort_by(|a, b| {
        key(b)
            .cmp(&key(a))
            .then(a.time.total_cmp(&b.time))
            .then_with(|| a.solver.cmp(&b.solver))
    });
    Ok(Ranking {
        mode,
        rank_by,
        n_instances,
        vbs,
        rows,
    })
}

impl Ranking {
    fn detail(&self, row: &RankingRow) -> String {
        let parts: Vec<String> = match self.mode {
            Mode::Csp => [(row.sat, "SAT"), (row.unsat, "UNSAT")]
                .iter()
                .filter(|(n, _)| *n > 0)
                .map(|(n, s)| format!("{n} {s}"))
                .collect(),
            Mode::Cop if row.optimum > 0 => vec![format!("{} OPT", row.optimum)],
            Mode::Cop => vec![],
        };
        parts.join(", ")
    }

    fn count(&self, row: &RankingRow, is_vbs: bool) -> String {
        match (self.rank_by, row.best_known) {
            (RankBy::BestKnown, b) => b.unwrap_or(0).to_string(),
            (RankBy::Solved, Some(b)) if !is_vbs => format!("{} ({b})", row.solved),
            _ => row.solved.to_string(),
        }
    }

    /// Aligned text table, VBS first.
    pub fn to_text(&self) -> String {
        let count_header = match self.rank_by {
            RankBy::Solved => "#solved",
            RankBy::BestKnown => "#best",
        };
        let mut lines: Vec<[String; 6]> = vec![[
            String::new(),
            "solver".into(),
            count_header.into(),
            String::new(),
            "%inst.".into(),
            "%VBS".into(),
        ]];
        let mut push = |rank: String, row: &RankingRow, is_vbs: bool| {
            lines.push([
                rank,
                if is_vbs { "Virtual Best Solver (VBS)".into() } else { row.solver.clone() },
                self.count(row, is_vbs),
                if self.rank_by == RankBy::Solved { self.detail(row) } else { String::new() },
                format!("{}%", row.pct_instances),
                format!("{}%", row.pct_vbs),
            ]);
        };
        push(String::new(), &self.vbs, true);
        for (i, row) in self.rows.iter().enumerate() {
            push((i + 1).to_string(), row, false);
        }
        let mut width = [0usize; 6];
        for l in &lines {
            for (w, cell) in width.iter_mut().zip(l) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for l in &lines {
            let mut line = String::new();
            for (i, cell) in l.iter().enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                if i == 1 || i == 3 {
                    let _ = write!(line, "{cell:<w$}", w = width[i]);
                } else {
                    let _ = write!(line, "{cell:>w$}", w = width[i]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// `rank,solver,solved,sat,unsat,optimum,best,pct_inst,pct_vbs`; the VBS
    /// row has an empty rank.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "rank", "solver", "solved", "sat", "unsat", "optimum", "best", "pct_inst", "pct_vbs",
        ])
        .expect("in-memory write");
        let rows = std::iter::once((String::new(), &self.vbs))
            .chain(self.rows.iter().enumerate().map(|(i, r)| ((i + 1).to_string(), r)));
        for (rank, r) in rows {
            w.write_record([
                rank,
                r.solver.clone(),
                r.solved.to_string(),
                r.sat.to_string(),
                r.unsat.to_string(),
                r.optimum.to_string(),
                r.best_known.map(|b| b.to_string()).unwrap_or_default(),
                r.pct_instances.to_string(),
                r.pct_vbs.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
