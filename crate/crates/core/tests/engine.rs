mod common;

use std::time::Duration;

use xcsp_mini::engine::{enumerate_all, optimize, solve, SearchConfig, Status, ValHeuristic, VarHeuristic};
use xcsp_mini::generators::*;
use xcsp_mini::model::{assignment_cost, constraint_satisfied, Assignment, Instance};

fn config() -> SearchConfig {
    SearchConfig::default().with_time_limit(Duration::from_secs(120))
}

fn valid(instance: &Instance, w: &Assignment) -> bool {
    instance
        .constraints
        .iter()
        .all(|c| constraint_satisfied(c, w).unwrap())
}

fn best(instance: &Instance) -> i64 {
    let out = optimize(instance, &config(), |_, _| {}).unwrap();
    assert_eq!(out.status, Status::Optimum);
    let w = out.witness.as_ref().unwrap();
    assert!(valid(instance, w));
    assert_eq!(assignment_cost(instance, w).unwrap(), out.bound.unwrap());
    out.bound.unwrap()
}

fn data(problem: ProblemId, payload: serde_json::Value) -> Instance {
    gen_catalog(&ProblemData::new(problem, payload)).unwrap()
}

#[test]
fn dubois_is_unsatisfiable() {
    for n in 3..=8 {
        let out = solve(&gen_dubois(n).unwrap(), &config()).unwrap();
        assert_eq!(out.status, Status::Unsat, "n = {n}");
    }
    assert_eq!(enumerate_all(&gen_dubois(3).unwrap(), 10).unwrap().count, 0);
}

#[test]
fn langford_verdicts() {
    assert_eq!(solve(&gen_langford(2).unwrap(), &config()).unwrap().status, Status::Unsat);
    for n in [3, 4, 7, 8] {
        let i = gen_langford(n).unwrap();
        let out = solve(&i, &config()).unwrap();
        assert_eq!(out.status, Status::Sat, "n = {n}");
        assert!(valid(&i, out.witness.as_ref().unwrap()));
    }
}

#[test]
fn magic_square_three_has_eight_solutions() {
    let e = enumerate_all(&gen_magic_square(3, None).unwrap(), 1000).unwrap();
    assert_eq!((e.count, e.complete), (8, true));
}

#[test]
fn magic_hexagon_three() {
    let i = gen_magic_hexagon(3, 1, Omit::default()).unwrap();
    let out = solve(&i, &config()).unwrap();
    assert_eq!(out.status, Status::Sat);
    assert!(valid(&i, out.witness.as_ref().unwrap()));
}

#[test]
fn small_optima() {
    assert_eq!(best(&data(ProblemId::Knapsack, common::knapsack_listed())), 283);
    assert_eq!(best(&data(ProblemId::Tsp, common::tsp_listed())), 22);
    assert_eq!(best(&data(ProblemId::Auction, common::auction_listed())), 54);
    let golomb: Vec<i64> = (2..=5)
        .map(|n| best(&gen_golomb_ruler(n, Omit::default()).unwrap()))
        .collect();
    assert_eq!(golomb, vec![1, 3, 6, 11]);
}

#[test]
fn low_autocorrelation_optima() {
    let got: Vec<i64> = (2..=8)
        .map(|n| best(&gen_low_autocorrelation(n).unwrap()))
        .collect();
    assert_eq!(got, vec![1, 1, 2, 2, 7, 3, 8]);
}

#[test]
fn still_life_optima() {
    let got: Vec<i64> = (1..=4)
        .map(|n| best(&gen_still_life(n, Omit::default()).unwrap()))
        .collect();
    assert_eq!(got, vec![0, 4, 6, 8]);
}

#[test]
fn heuristics_agree_on_verdicts() {
    let i = gen_langford(4).unwrap();
    for var_heuristic in [VarHeuristic::DomWdeg, VarHeuristic::Lex] {
        for val_heuristic in [ValHeuristic::Min, ValHeuristic::Max] {
            for (seed, restarts) in [(0, false), (7, true)] {
                let c = SearchConfig {
                    var_heuristic,
                    val_heuristic,
                    seed,
                    restarts,
                    ..config()
                };
                assert_eq!(solve(&i, &c).unwrap().status, Status::Sat);
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let i = gen_golomb_ruler(5, Omit::default()).unwrap();
    let a = optimize(&i, &config(), |_, _| {}).unwrap();
    let b = optimize(&i, &config(), |_, _| {}).unwrap();
    assert_eq!(a.stats.nodes, b.stats.nodes);
    assert_eq!((a.status, a.bound, a.witness), (b.status, b.bound, b.witness));
}

#[test]
fn bounds_strictly_improve() {
    let i = data(ProblemId::Tsp, common::tsp_listed());
    let mut seen = Vec::new();
    optimize(&i, &config(), |c, _| seen.push(c)).unwrap();
    assert!(seen.windows(2).all(|w| w[1] < w[0]), "{seen:?}");
    assert_eq!(*seen.last().unwrap(), 22);
}
