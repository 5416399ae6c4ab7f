//! One PASS/FAIL line per acceptance criterion, each held to its time
//! budget. Exits non-zero when any criterion fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::oracles;
use common::suites;
use common::tables::{conformance_mismatches, records, tracks};
use xcsp_mini::engine::{enumerate_all, optimize, solve, SearchConfig, Status};
use xcsp_mini::generators::*;
use xcsp_mini::harness::{score_track_with, RankBy, Senses};
use xcsp_mini::model::{
    assignment_cost, constraint_satisfied, Assignment, Constraint, ConstraintKind, Instance,
};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn config(limit: Duration) -> SearchConfig {
    SearchConfig::default().with_time_limit(limit)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs `f` and fails it when it exceeds `budget` as well.
fn timed(budget: Duration, what: &str, f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    f()?;
    let took = t.elapsed();
    ensure!(took <= budget, "{what} took {took:.2?}, budget {budget:?}");
    Ok(())
}

fn satisfies(instance: &Instance, w: &Assignment) -> bool {
    instance
        .variables
        .iter()
        .all(|v| w.get(&v.id).is_some_and(|x| v.domain.contains(x)))
        && instance
            .constraints
            .iter()
            .all(|c| constraint_satisfied(c, w).unwrap_or(false))
}

fn ranking() -> Check {
    for track in tracks() {
        let recs = records(&track);
        let r = score_track_with(&recs, track.n_instances, track.mode, track.rank_by, &Senses::new())
            .map_err(err)?;
        let count = |row: &xcsp_mini::harness::RankingRow| match track.rank_by {
            RankBy::Solved => Some(row.solved),
            RankBy::BestKnown => row.best_known,
        };
        ensure!(count(&r.vbs) == Some(track.vbs), "{}: VBS {:?}", track.name, count(&r.vbs));
        ensure!(
            r.vbs.pct_instances == track.vbs_pct_instances,
            "{}: VBS %inst {}",
            track.name,
            r.vbs.pct_instances
        );
        ensure!(r.rows.len() == track.rows.len(), "{}: {} rows", track.name, r.rows.len());
        // within equal counts the printed order follows unpublished runtimes
        let got: Vec<_> = r.rows.iter().map(count).collect();
        let printed: Vec<_> = track.rows.iter().map(|w| Some(w.count)).collect();
        ensure!(got == printed, "{}: counts {got:?}", track.name);
        for want in &track.rows {
            let got = r
                .rows
                .iter()
                .find(|x| x.solver == want.solver)
                .ok_or_else(|| format!("{}: no row for {}", track.name, want.solver))?;
            ensure!(
                want.best.is_none() || got.best_known == want.best,
                "{} {}: best {:?}",
                track.name,
                want.solver,
                got.best_known
            );
            ensure!(
                (got.pct_instances, got.pct_vbs) == (want.pct_instances, want.pct_vbs),
                "{} {}: got {}% / {}%, printed {}% / {}%",
                track.name,
                want.solver,
                got.pct_instances,
                got.pct_vbs,
                want.pct_instances,
                want.pct_vbs
            );
        }
    }
    Ok(())
}

fn structure() -> Check {
    for n in 3..=10 {
        let i = gen_dubois(n).map_err(err)?;
        ensure!(i.variables.len() == 3 * n, "dubois {n}: {} variables", i.variables.len());
        ensure!(i.constraints.len() == 2 * n, "dubois {n}: {} constraints", i.constraints.len());
        for c in &i.constraints {
            let ternary = matches!(c, Constraint::Extension { scope, .. } if scope.len() == 3);
            ensure!(ternary, "dubois {n}: {:?} is not a ternary extension", c.kind());
        }
    }
    let bad = conformance_mismatches();
    ensure!(bad.is_empty(), "constraint mix differs: {bad:?}");
    Ok(())
}

fn optimum(instance: &Instance, expected: i64, what: &str) -> Check {
    timed(Duration::from_secs(60), what, || {
        let out = optimize(instance, &config(Duration::from_secs(60)), |_, _| {}).map_err(err)?;
        ensure!(out.status == Status::Optimum, "{what}: status {}", out.status);
        ensure!(out.bound == Some(expected), "{what}: bound {:?}, oracle {expected}", out.bound);
        let w = out.witness.as_ref().ok_or("optimum without a witness")?;
        ensure!(satisfies(instance, w), "{what}: witness violates a constraint");
        ensure!(assignment_cost(instance, w) == Ok(expected), "{what}: witness cost differs");
        Ok(())
    })
}

fn catalog(problem: ProblemId, payload: serde_json::Value) -> Result<Instance, String> {
    gen_catalog(&ProblemData::new(problem, payload)).map_err(err)
}

fn optima() -> Check {
    let pinned = [
        ("knapsack", oracles::knapsack(&common::knapsack_listed()), 283),
        ("tsp", oracles::tsp(&common::tsp_listed()), 22),
        ("golomb 4", oracles::golomb(4), 6),
        ("still life 3", oracles::still_life(3), 6),
        ("auction", oracles::auction(&common::auction_listed()), 54),
    ];
    for (what, oracle, pinned) in pinned {
        ensure!(oracle == pinned, "{what}: oracle says {oracle}, pinned {pinned}");
    }
    optimum(&catalog(ProblemId::Knapsack, common::knapsack_listed())?, 283, "knapsack")?;
    optimum(&catalog(ProblemId::Tsp, common::tsp_listed())?, 22, "tsp")?;
    optimum(&gen_golomb_ruler(4, Omit::default()).map_err(err)?, 6, "golomb 4")?;
    for n in 2..=7 {
        let i = gen_low_autocorrelation(n).map_err(err)?;
        optimum(&i, oracles::low_autocorrelation(n), &format!("low autocorrelation {n}"))?;
    }
    optimum(&gen_still_life(3, Omit::default()).map_err(err)?, 6, "still life 3")?;
    optimum(&catalog(ProblemId::Auction, common::auction_listed())?, 54, "auction")?;
    Ok(())
}

fn verdict(instance: &Instance, expected: Status, what: &str) -> Check {
    timed(Duration::from_secs(120), what, || {
        let out = solve(instance, &config(Duration::from_secs(120))).map_err(err)?;
        ensure!(out.status == expected, "{what}: {}", out.status);
        if expected == Status::Sat {
            let w = out.witness.as_ref().ok_or("SAT without a witness")?;
            ensure!(satisfies(instance, w), "{what}: witness violates a constraint");
        }
        Ok(())
    })
}

/// Sums every row and both diagonal directions of a hexagon witness,
/// recomputed from axial coordinates rather than the generator's lines.
fn hexagon_line_sums(n: usize, w: &Assignment) -> Result<Vec<i64>, String> {
    let h = n as i64 - 1;
    let mut lines: HashMap<(u8, i64), i64> = HashMap::new();
    for i in 0..=2 * h {
        let r = i - h;
        let q0 = (-h).max(-r - h);
        let q1 = h.min(h - r);
        for (j, q) in (q0..=q1).enumerate() {
            let name = format!("x[{i}][{j}]");
            let v = w.get(&name).ok_or_else(|| format!("no cell {name}"))?;
            for key in [(0, r), (1, q), (2, -q - r)] {
                *lines.entry(key).or_default() += v;
            }
        }
    }
    Ok(lines.into_values().collect())
}

fn verdicts() -> Check {
    for n in 3..=8 {
        verdict(&gen_dubois(n).map_err(err)?, Status::Unsat, &format!("dubois {n}"))?;
    }
    verdict(&gen_langford(2).map_err(err)?, Status::Unsat, "langford 2")?;
    for n in [3, 4, 7, 8] {
        verdict(&gen_langford(n).map_err(err)?, Status::Sat, &format!("langford {n}"))?;
    }
    let hex = gen_magic_hexagon(3, 1, Omit::default()).map_err(err)?;
    timed(Duration::from_secs(120), "magic hexagon", || {
        let out = solve(&hex, &config(Duration::from_secs(120))).map_err(err)?;
        ensure!(out.status == Status::Sat, "magic hexagon: {}", out.status);
        let w = out.witness.as_ref().ok_or("SAT without a witness")?;
        ensure!(satisfies(&hex, w), "magic hexagon: witness violates a constraint");
        let sums = hexagon_line_sums(3, w)?;
        ensure!(sums.len() == 15 && sums.iter().all(|&s| s == 38), "magic hexagon sums {sums:?}");
        Ok(())
    })?;
    timed(Duration::from_secs(120), "magic square", || {
        let e = enumerate_all(&gen_magic_square(3, None).map_err(err)?, 1000).map_err(err)?;
        ensure!((e.count, e.complete) == (8, true), "magic square 3: {} solutions", e.count);
        Ok(())
    })
}

fn oracle_equivalence() -> Check {
    suites::oracle_equivalence(3000).map(|_| ())
}

fn round_trip() -> Check {
    let n = suites::round_trip()?;
    ensure!(n >= ProblemId::ALL.len(), "only {n} samples");
    Ok(())
}

fn soundness() -> Check {
    suites::propagator_soundness(400)?;
    suites::lone_constraint(ConstraintKind::Extension, 1000, true)
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 7] = [
        ("ranking reproduction", 1, ranking),
        ("generator structure", 5, structure),
        ("desk-scale optima", 6 * 60 + 5 * 60, optima),
        ("proven verdicts", 13 * 120, verdicts),
        ("oracle equivalence", 5 * 60, oracle_equivalence),
        ("round trip", 60, round_trip),
        ("propagator soundness", 5 * 60, soundness),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let t = Instant::now();
        let result = match catch_unwind(AssertUnwindSafe(|| timed(Duration::from_secs(budget), name, check))) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let took = t.elapsed();
        match result {
            Ok(()) => println!("PASS {name} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
