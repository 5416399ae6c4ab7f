//! Property suites shared by their own test targets and the acceptance
//! run. Each returns the first counterexample as an error.

use std::collections::HashMap;
use std::time::Duration;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xcsp_mini::engine::{
    enumerate_with, optimize, solve, Fixpoint, SearchConfig, Solver, Status, ValHeuristic,
    VarHeuristic,
};
use xcsp_mini::generators::gen_catalog;
use xcsp_mini::model::{
    assignment_cost, constraint_satisfied, validate_instance, Assignment, Constraint,
    ConstraintKind, Instance, Variable,
};
use xcsp_mini::xcsp::{parse_instance, write_instance};

use super::random::{
    brute_force, names, random_constraint, random_domain, random_instance, random_objective,
    supported, KINDS,
};

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn configs() -> Vec<SearchConfig> {
    let base = SearchConfig::default().with_time_limit(Duration::from_secs(60));
    vec![
        base.clone(),
        SearchConfig {
            var_heuristic: VarHeuristic::Lex,
            val_heuristic: ValHeuristic::Max,
            ..base.clone()
        },
        SearchConfig {
            seed: 11,
            restarts: true,
            ..base
        },
    ]
}

fn valid(instance: &Instance, w: &Assignment) -> bool {
    w.len() == instance.variables.len()
        && instance
            .variables
            .iter()
            .all(|v| w.get(&v.id).is_some_and(|x| v.domain.contains(x)))
        && instance
            .constraints
            .iter()
            .all(|c| constraint_satisfied(c, w).unwrap_or(false))
}

/// Seeds `0..n`; instance `s` always contains a constraint of kind
/// `KINDS[s % 18]`. Returns how many were satisfiable.
pub fn oracle_equivalence(n: u64) -> Result<u64, String> {
    let configs = configs();
    let mut sat = 0;
    for seed in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = KINDS[seed as usize % KINDS.len()];
        let csp = random_instance(&mut rng, 6, 5, Some(kind));
        let report = validate_instance(&csp);
        ensure!(report.is_empty(), "seed {seed}: generator produced an invalid instance: {report:?}");
        let truth = brute_force(&csp);
        sat += (truth.count > 0) as u64;
        let config = &configs[seed as usize % configs.len()];

        let out = solve(&csp, config).map_err(|e| e.to_string())?;
        let expected = if truth.count > 0 { Status::Sat } else { Status::Unsat };
        ensure!(out.status == expected, "seed {seed}: solve said {} for {csp:?}", out.status);
        if let Some(w) = &out.witness {
            ensure!(valid(&csp, w), "seed {seed}: invalid witness {w:?}");
        }

        let e = enumerate_with(&csp, u64::MAX, config).map_err(|e| e.to_string())?;
        ensure!(
            (e.count, e.complete) == (truth.count, true),
            "seed {seed}: enumerated {} of {} solutions for {csp:?}",
            e.count,
            truth.count
        );

        let objective = random_objective(&mut rng, &names(csp.variables.len()));
        let cop = csp.with_objective(objective);
        let best = brute_force(&cop).optimum;
        let out = optimize(&cop, config, |_, _| {}).map_err(|e| e.to_string())?;
        match best {
            Some(b) => {
                ensure!(
                    (out.status, out.bound) == (Status::Optimum, Some(b)),
                    "seed {seed}: optimize gave {} {:?}, expected {b} for {cop:?}",
                    out.status,
                    out.bound
                );
                let w = out.witness.as_ref().ok_or("optimum without witness")?;
                ensure!(valid(&cop, w), "seed {seed}: invalid witness");
                ensure!(assignment_cost(&cop, w) == Ok(b), "seed {seed}: witness cost differs");
            }
            None => ensure!(out.status == Status::Unsat, "seed {seed}: expected UNSAT, got {}", out.status),
        }
    }
    Ok(sat)
}

fn domains(s: &Solver, vars: &[String]) -> HashMap<String, Vec<i64>> {
    vars.iter().map(|v| (v.clone(), s.domain(v).unwrap())).collect()
}

/// Values dropped between `before` and `after` have no support in
/// `before`; a conflict (`after` = None) means `before` has no solution.
fn check_step(
    c: &Constraint,
    before: &HashMap<String, Vec<i64>>,
    after: Option<&HashMap<String, Vec<i64>>>,
    what: &str,
) -> Result<(), String> {
    match after {
        Some(after) => {
            for (v, vals) in before {
                for &a in vals {
                    if !after[v].contains(&a) {
                        ensure!(
                            !supported(c, before, v, a),
                            "{what}: removed {v}={a} which has support in {before:?} for {c:?}"
                        );
                    }
                }
            }
        }
        None => {
            let any = before
                .iter()
                .any(|(v, vals)| vals.iter().any(|&a| supported(c, before, v, a)));
            ensure!(!any, "{what}: conflict although {before:?} has a solution of {c:?}");
        }
    }
    Ok(())
}

/// Runs a lone constraint of `kind` on random domains, then under a few
/// random removals; every removal must be unsupported. With `gac`, every
/// remaining value must also be supported.
pub fn lone_constraint(kind: ConstraintKind, trials: u64, gac: bool) -> Result<(), String> {
    let vars = names(4);
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (kind as u64) << 32);
        let c = random_constraint(&mut rng, kind, &vars, 4);
        let variables = vars
            .iter()
            .map(|v| Variable::new(v.clone(), random_domain(&mut rng, 4)))
            .collect();
        let instance = Instance::new(variables, vec![c]);
        let c = &instance.constraints[0];
        let mut s = Solver::new(&instance).map_err(|e| e.to_string())?;
        let what = format!("{} seed {seed}", kind.name());
        let mut before = domains(&s, &vars);
        for round in 0..4 {
            if s.propagate() != Fixpoint::Consistent {
                check_step(c, &before, None, &what)?;
                break;
            }
            let after = domains(&s, &vars);
            check_step(c, &before, Some(&after), &what)?;
            if gac {
                for (v, vals) in &after {
                    for &a in vals {
                        ensure!(supported(c, &after, v, a), "{what}: {v}={a} unsupported in {after:?}");
                    }
                }
            }
            if round == 3 {
                break;
            }
            s.push();
            let v = vars.choose(&mut rng).unwrap();
            let dom = &after[v];
            if dom.len() <= 1 {
                continue;
            }
            let a = dom[rng.random_range(0..dom.len())];
            if s.remove_value(s.var(v).unwrap(), a).is_err() {
                break;
            }
            before = domains(&s, &vars);
        }
    }
    Ok(())
}

pub fn propagator_soundness(trials: u64) -> Result<(), String> {
    for kind in KINDS {
        lone_constraint(kind, trials, false)?;
    }
    Ok(())
}

/// parse(write(I)) == I and write(parse(write(I))) is byte-identical, for
/// every corpus sample.
pub fn round_trip() -> Result<usize, String> {
    let samples = super::samples();
    for (label, data) in &samples {
        let inst = gen_catalog(data).map_err(|e| format!("{label}: {e}"))?;
        let xml = write_instance(&inst).map_err(|e| format!("{label}: {e}"))?;
        let back = parse_instance(&xml).map_err(|e| format!("{label}: {e}"))?;
        ensure!(back == inst, "{label}: parsed instance differs");
        let again = write_instance(&back).map_err(|e| format!("{label}: {e}"))?;
        ensure!(again == xml, "{label}: canonical output is unstable");
    }
    Ok(samples.len())
}
