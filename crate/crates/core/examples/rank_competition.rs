//! Scores a tiny satisfaction track from run records.

use xcsp_mini::harness::{score_track, Mode, RunRecord, RunStatus};

fn main() {
    let run = |instance: &str, solver: &str, status, elapsed| RunRecord {
        instance: instance.into(),
        solver: solver.into(),
        status,
        bound: None,
        elapsed,
    };
    let records = vec![
        run("a", "fast", RunStatus::Sat, 1.0),
        run("b", "fast", RunStatus::Unknown, 60.0),
        run("a", "steady", RunStatus::Sat, 5.0),
        run("b", "steady", RunStatus::Unsat, 9.0),
        run("a", "liar", RunStatus::Invalid, 0.1),
    ];
    let ranking = score_track(&records, 2, Mode::Csp).unwrap();
    print!("{}", ranking.to_text());
}
