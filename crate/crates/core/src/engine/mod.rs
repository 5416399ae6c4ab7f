//! Propagation and backtracking search.
//!
//! [`Solver`] owns a trailed [`DomainStore`] and one or more propagators
//! per constraint. [`solve`], [`optimize`] and [`enumerate_all`] run a
//! depth-first 2-way branching search on top of it. Every total assignment
//! is checked against the model checkers before it is reported, so
//! reported witnesses are valid even where filtering is weak.

mod propagators;
mod search;
mod store;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::model::{
    assignment_cost, constraint_satisfied, validate_instance, Assignment, Instance, Kind,
    Valuation, ValidationReport,
};
use propagators::{Compiler, Propagator};

pub use search::{enumerate_all, enumerate_with, optimize, solve};
pub use store::{Conflict, DomainStore, Prune, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VarHeuristic {
    /// Smallest domain size over weighted degree.
    #[default]
    DomWdeg,
    /// First unfixed variable in declaration order.
    Lex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ValHeuristic {
    #[default]
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub time_limit: Duration,
    /// 0 breaks heuristic ties by declaration order; other seeds by a
    /// seeded hash.
    pub seed: u64,
    pub restarts: bool,
    pub var_heuristic: VarHeuristic,
    pub val_heuristic: ValHeuristic,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            time_limit: Duration::from_secs(2400),
            seed: 0,
            restarts: false,
            var_heuristic: VarHeuristic::DomWdeg,
            val_heuristic: ValHeuristic::Min,
        }
    }
}

impl SearchConfig {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = limit;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Optimum,
    Unknown,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Optimum => "OPTIMUM",
            Status::Unknown => "UNKNOWN",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub nodes: u64,
    pub failures: u64,
    pub propagations: u64,
    /// Total assignments that passed propagation but failed a checker.
    pub rejected_leaves: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: Status,
    pub witness: Option<Assignment>,
    /// Best objective value found.
    pub bound: Option<i64>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    pub count: u64,
    /// False when the count stopped at the cap or the time limit.
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixpoint {
    Consistent,
    /// Index of the constraint whose propagator failed; the objective
    /// bound reports `constraints.len()`.
    Conflict(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),
    #[error("expected a {expected} instance, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

/// Reads values of fixed variables by identifier.
struct StoreValuation<'a> {
    index: &'a HashMap<&'a str, VarId>,
    store: &'a DomainStore,
}

impl Valuation for StoreValuation<'_> {
    fn value_of(&self, id: &str) -> Option<i64> {
        self.index.get(id).and_then(|&v| self.store.value(v))
    }
}

/// Domains plus compiled propagators for one instance.
pub struct Solver<'a> {
    instance: &'a Instance,
    index: HashMap<&'a str, VarId>,
    store: DomainStore,
    props: Vec<Box<dyn Propagator>>,
    scopes: Vec<Vec<VarId>>,
    watchers: Vec<Vec<usize>>,
    owner: Vec<usize>,
    weight: Vec<u64>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    objective_prop: Option<usize>,
    stats: Stats,
}

impl<'a> Solver<'a> {
    pub fn new(instance: &'a Instance) -> Result<Solver<'a>, EngineError> {
        let report = validate_instance(instance);
        if !report.is_empty() {
            return Err(EngineError::InvalidInstance(report));
        }
        let store = DomainStore::new(
            instance
                .variables
                .iter()
                .map(|v| v.domain.values().to_vec())
                .collect(),
        );
        let mut solver = Solver {
            instance,
            index: instance.index_map(),
            store,
            props: Vec::new(),
            scopes: Vec::new(),
            watchers: vec![Vec::new(); instance.variables.len()],
            owner: Vec::new(),
            weight: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
            objective_prop: None,
            stats: Stats::default(),
        };
        let compiler = Compiler::new(instance);
        for (ci, c) in instance.constraints.iter().enumerate() {
            let mut out = Vec::new();
            compiler.compile(c, &mut solver.store, &mut out);
            for p in out {
                solver.add(p, ci);
            }
        }
        if let Some(obj) = &instance.objective {
            let p = compiler.objective(&obj.target, obj.sense);
            solver.objective_prop = Some(solver.props.len());
            solver.add(p, instance.constraints.len());
        }
        Ok(solver)
    }

    fn add(&mut self, p: Box<dyn Propagator>, owner: usize) {
        let id = self.props.len();
        let mut scope = p.scope();
        scope.sort_unstable();
        scope.dedup();
        for &v in &scope {
            self.watchers[v].push(id);
        }
        self.scopes.push(scope);
        self.props.push(p);
        self.owner.push(owner);
        self.weight.push(1);
        self.queued.push(true);
        self.queue.push_back(id);
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    pub fn store(&self) -> &DomainStore {
        &self.store
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn var(&self, id: &str) -> Option<VarId> {
        self.index.get(id).copied()
    }

    pub fn domain(&self, id: &str) -> Option<Vec<i64>> {
        self.var(id).map(|v| self.store.domain(v))
    }

    pub fn push(&mut self) {
        self.store.push();
    }

    pub fn pop(&mut self) {
        self.store.pop();
        self.clear_queue();
    }

    /// Removes `value` from `var`; `Err` on wipe-out. Call [`propagate`]
    /// afterwards to reach a fixpoint.
    ///
    /// [`propagate`]: Solver::propagate
    pub fn remove_value(&mut self, var: VarId, value: i64) -> Prune {
        self.store.remove(var, value)
    }

    pub fn assign(&mut self, var: VarId, value: i64) -> Prune {
        self.store.assign(var, value)
    }

    fn clear_queue(&mut self) {
        for p in self.queue.drain(..) {
            self.queued[p] = false;
        }
        self.store.clear_changed();
    }

    fn wake_changed(&mut self) {
        for v in self.store.take_changed() {
            for &p in &self.watchers[v] {
                if !self.queued[p] {
                    self.queued[p] = true;
                    self.queue.push_back(p);
                }
            }
        }
    }

    /// Runs propagators until none removes a value or one fails.
    pub fn propagate(&mut self) -> Fixpoint {
        // a backtrack drops the queue, and the tightened bound must still
        // reach the restored levels
        if self.store.objective_bound().is_some() {
            self.schedule_objective();
        }
        self.wake_changed();
        while let Some(p) = self.queue.pop_front() {
            self.queued[p] = false;
            self.stats.propagations += 1;
            let result = self.props[p].propagate(&mut self.store);
            if result.is_err() {
                self.weight[p] += 1;
                self.stats.failures += 1;
                self.clear_queue();
                return Fixpoint::Conflict(self.owner[p]);
            }
            self.wake_changed();
        }
        Fixpoint::Consistent
    }

    /// Installs a new incumbent objective value and schedules the bound
    /// propagator.
    pub(crate) fn set_objective_bound(&mut self, bound: i64) {
        self.store.set_objective_bound(Some(bound));
        self.schedule_objective();
    }

    fn schedule_objective(&mut self) {
        if let Some(p) = self.objective_prop {
            if !self.queued[p] {
                self.queued[p] = true;
                self.queue.push_back(p);
            }
        }
    }

    pub fn all_fixed(&self) -> bool {
        (0..self.store.num_vars()).all(|v| self.store.is_fixed(v))
    }

    fn valuation(&self) -> StoreValuation<'_> {
        StoreValuation {
            index: &self.index,
            store: &self.store,
        }
    }

    /// Every constraint holds on the current total assignment.
    pub fn check_all(&self) -> bool {
        let v = self.valuation();
        self.instance
            .constraints
            .iter()
            .all(|c| constraint_satisfied(c, &v).unwrap_or(false))
    }

    pub fn cost(&self) -> Option<i64> {
        assignment_cost(self.instance, &self.valuation()).ok()
    }

    /// The current values of fixed variables.
    pub fn assignment(&self) -> Assignment {
        let mut a = Assignment::new();
        for (i, var) in self.instance.variables.iter().enumerate() {
            if let Some(x) = self.store.value(i) {
                a.insert(var.id.clone(), x);
            }
        }
        a
    }
}

/// One propagation pass over a fresh store for `instance`.
pub fn propagate_to_fixpoint(instance: &Instance) -> Result<(Fixpoint, Vec<Vec<i64>>), EngineError> {
    let mut solver = Solver::new(instance)?;
    let fix = solver.propagate();
    Ok((fix, solver.store.snapshot()))
}

fn kind_check(instance: &Instance, expected: Kind) -> Result<(), EngineError> {
    if instance.kind != expected {
        return Err(EngineError::WrongKind {
            expected: expected.name(),
            found: instance.kind.name(),
        });
    }
    Ok(())
}

fn config_check(config: &SearchConfig) -> Result<(), EngineError> {
    if config.time_limit.is_zero() {
        return Err(EngineError::InvalidConfig("time limit must be positive".into()));
    }
    Ok(())
}
