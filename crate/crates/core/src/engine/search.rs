use std::time::Instant;

use super::{
    config_check, kind_check, EngineError, Enumeration, Fixpoint, SearchConfig, SolveOutcome,
    Solver, Stats, Status, ValHeuristic, VarHeuristic, VarId,
};
use crate::model::{Assignment, Instance, Kind};

const FIRST_RESTART: f64 = 100.0;
const RESTART_GROWTH: f64 = 1.5;

enum Stop {
    Exhausted,
    TimedOut,
    Halted,
}

/// Tie-break hash for seeded variable ordering (splitmix64 finalizer).
fn mix(seed: u64, v: VarId) -> u64 {
    let mut z = seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Search<'a> {
    solver: Solver<'a>,
    config: SearchConfig,
    started: Instant,
    /// Decision variables first, then the rest, each in declaration order.
    order: Vec<VarId>,
    decisions: usize,
    stack: Vec<(VarId, i64)>,
    restart_limit: f64,
    failures_since_restart: u64,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, config: &SearchConfig) -> Result<Search<'a>, EngineError> {
        config_check(config)?;
        let solver = Solver::new(instance)?;
        let mut order: Vec<VarId> = Vec::new();
        if let Some(dv) = &instance.decision {
            for id in dv {
                let v = solver.var(id).expect("validated decision variable");
                if !order.contains(&v) {
                    order.push(v);
                }
            }
        }
        let decisions = order.len();
        let mut seen = vec![false; instance.variables.len()];
        for &v in &order {
            seen[v] = true;
        }
        order.extend((0..instance.variables.len()).filter(|&v| !seen[v]));
        Ok(Search {
            solver,
            config: config.clone(),
            started: Instant::now(),
            order,
            decisions,
            stack: Vec::new(),
            restart_limit: FIRST_RESTART,
            failures_since_restart: 0,
        })
    }

    fn select(&self) -> Option<VarId> {
        let s = self.solver.store();
        let groups = [&self.order[..self.decisions], &self.order[self.decisions..]];
        for group in groups {
            let open: Vec<VarId> = group.iter().copied().filter(|&v| !s.is_fixed(v)).collect();
            if open.is_empty() {
                continue;
            }
            if self.config.var_heuristic == VarHeuristic::Lex {
                return Some(open[0]);
            }
            return Some(self.dom_wdeg(&open));
        }
        None
    }

    fn dom_wdeg(&self, open: &[VarId]) -> VarId {
        let s = self.solver.store();
        let unfixed: Vec<usize> = self
            .solver
            .scopes
            .iter()
            .map(|sc| sc.iter().filter(|&&v| !s.is_fixed(v)).count())
            .collect();
        let score = |v: VarId| {
            let wdeg: u64 = self.solver.watchers[v]
                .iter()
                .filter(|&&p| unfixed[p] >= 2)
                .map(|&p| self.solver.weight[p])
                .sum();
            (s.size(v) as u128, wdeg.max(1) as u128)
        };
        let tie = |v: VarId| if self.config.seed == 0 { 0 } else { mix(self.config.seed, v) };
        let mut best = open[0];
        let mut best_score = score(best);
        for &v in &open[1..] {
            let sc = score(v);
            // size_a / wdeg_a < size_b / wdeg_b
            let lhs = sc.0 * best_score.1;
            let rhs = best_score.0 * sc.1;
            if lhs < rhs || (lhs == rhs && tie(v) < tie(best)) {
                best = v;
                best_score = sc;
            }
        }
        best
    }

    fn timed_out(&self) -> bool {
        self.started.elapsed() >= self.config.time_limit
    }

    fn consistent(&mut self) -> bool {
        let ok = self.solver.propagate() == Fixpoint::Consistent;
        if !ok {
            self.failures_since_restart += 1;
        }
        ok
    }

    /// Undoes the last decision and takes its right branch, repeatedly,
    /// until a consistent node is reached. False when the tree is
    /// exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some((v, val)) = self.stack.pop() {
            self.solver.pop();
            if self.solver.remove_value(v, val).is_err() {
                self.solver.stats.failures += 1;
                self.failures_since_restart += 1;
                continue;
            }
            if self.consistent() {
                return true;
            }
        }
        false
    }

    /// Restarts from the root once enough failures accumulated. False when
    /// the root itself became inconsistent.
    fn maybe_restart(&mut self) -> bool {
        if !self.config.restarts || (self.failures_since_restart as f64) < self.restart_limit {
            return true;
        }
        self.failures_since_restart = 0;
        self.restart_limit *= RESTART_GROWTH;
        self.stack.clear();
        while self.solver.store().level() > 0 {
            self.solver.pop();
        }
        self.consistent()
    }

    /// Depth-first search; `on_leaf` returns false to stop.
    fn run(&mut self, on_leaf: &mut dyn FnMut(&mut Solver<'a>) -> bool) -> Stop {
        if !self.consistent() {
            return Stop::Exhausted;
        }
        loop {
            if self.timed_out() {
                return Stop::TimedOut;
            }
            match self.select() {
                Some(v) => {
                    let s = self.solver.store();
                    let val = match self.config.val_heuristic {
                        ValHeuristic::Min => s.min(v),
                        ValHeuristic::Max => s.max(v),
                    };
                    self.solver.stats.nodes += 1;
                    self.solver.push();
                    self.stack.push((v, val));
                    if self.solver.assign(v, val).is_ok() && self.consistent() {
                        continue;
                    }
                }
                None => {
                    if self.solver.check_all() {
                        if !on_leaf(&mut self.solver) {
                            return Stop::Halted;
                        }
                    } else {
                        self.solver.stats.rejected_leaves += 1;
                    }
                }
            }
            if !self.backtrack() {
                return Stop::Exhausted;
            }
            if !self.maybe_restart() {
                return Stop::Exhausted;
            }
        }
    }

    fn stats(&self) -> Stats {
        let mut st = self.solver.stats();
        st.elapsed = self.started.elapsed();
        st
    }
}

/// Finds one solution of a CSP instance.
pub fn solve(instance: &Instance, config: &SearchConfig) -> Result<SolveOutcome, EngineError> {
    kind_check(instance, Kind::Csp)?;
    let mut search = Search::new(instance, config)?;
    let mut witness: Option<Assignment> = None;
    let stop = search.run(&mut |s| {
        witness = Some(s.assignment());
        false
    });
    let status = match stop {
        Stop::Halted => Status::Sat,
        Stop::Exhausted => Status::Unsat,
        Stop::TimedOut => Status::Unknown,
    };
    Ok(SolveOutcome {
        status,
        witness,
        bound: None,
        stats: search.stats(),
    })
}

/// Branch-and-bound over a COP instance. `on_improve` receives every
/// strictly improving objective value with its witness.
pub fn optimize(
    instance: &Instance,
    config: &SearchConfig,
    mut on_improve: impl FnMut(i64, &Assignment),
) -> Result<SolveOutcome, EngineError> {
    kind_check(instance, Kind::Cop)?;
    let mut search = Search::new(instance, config)?;
    let sense = instance.objective.as_ref().map(|o| o.sense).expect("COP has an objective");
    let mut best: Option<(i64, Assignment)> = None;
    let stop = search.run(&mut |s| {
        let cost = s.cost().expect("objective of a total assignment");
        if best.as_ref().is_some_and(|(b, _)| !sense.improves(cost, *b)) {
            s.stats.rejected_leaves += 1;
            return true;
        }
        let witness = s.assignment();
        on_improve(cost, &witness);
        best = Some((cost, witness));
        s.set_objective_bound(cost);
        true
    });
    let status = match (stop, &best) {
        (Stop::TimedOut, Some(_)) => Status::Sat,
        (Stop::TimedOut, None) => Status::Unknown,
        (_, Some(_)) => Status::Optimum,
        (_, None) => Status::Unsat,
    };
    let (bound, witness) = match best {
        Some((c, w)) => (Some(c), Some(w)),
        None => (None, None),
    };
    Ok(SolveOutcome {
        status,
        witness,
        bound,
        stats: search.stats(),
    })
}

/// Counts solutions of a CSP instance, stopping at `cap`.
pub fn enumerate_all(instance: &Instance, cap: u64) -> Result<Enumeration, EngineError> {
    enumerate_with(instance, cap, &SearchConfig::default())
}

pub fn enumerate_with(
    instance: &Instance,
    cap: u64,
    config: &SearchConfig,
) -> Result<Enumeration, EngineError> {
    kind_check(instance, Kind::Csp)?;
    // a restart would revisit counted solutions
    let config = SearchConfig {
        restarts: false,
        ..config.clone()
    };
    let mut search = Search::new(instance, &config)?;
    if cap == 0 {
        return Ok(Enumeration {
            count: 0,
            complete: false,
        });
    }
    let mut count = 0;
    let stop = search.run(&mut |_| {
        count += 1;
        count < cap
    });
    Ok(Enumeration {
        count,
        complete: matches!(stop, Stop::Exhausted),
    })
}
