use std::collections::HashSet;

use thiserror::Error;

use super::constraint::{Condition, Constraint, Operand, OrderOp};
use super::expr::EvalError;
use super::instance::{Instance, ObjectiveTarget};
use super::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),
    #[error("instance has no objective")]
    NotAnOptimizationInstance,
    #[error(transparent)]
    Eval(EvalError),
}

impl From<EvalError> for CheckError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnboundVariable(id) => CheckError::UnboundVariable(id),
            e => CheckError::Eval(e),
        }
    }
}

fn value(v: &(impl Valuation + ?Sized), id: &str) -> Result<i64, CheckError> {
    v.value_of(id)
        .ok_or_else(|| CheckError::UnboundVariable(id.to_string()))
}

fn values(v: &(impl Valuation + ?Sized), ids: &[String]) -> Result<Vec<i64>, CheckError> {
    ids.iter().map(|id| value(v, id)).collect()
}

fn operand(v: &(impl Valuation + ?Sized), op: &Operand) -> Result<i64, CheckError> {
    match op {
        Operand::Const(c) => Ok(*c),
        Operand::Var(id) => value(v, id),
    }
}

fn mismatch(what: impl Into<String>) -> CheckError {
    CheckError::ScopeMismatch(what.into())
}

/// Whether `lhs <condition>` holds.
pub(crate) fn condition_holds(
    v: &(impl Valuation + ?Sized),
    lhs: i128,
    cond: &Condition,
) -> Result<bool, CheckError> {
    Ok(match cond {
        Condition::Cmp(rel, rhs) => {
            let r = operand(v, rhs)? as i128;
            match rel {
                super::Relation::Lt => lhs < r,
                super::Relation::Le => lhs <= r,
                super::Relation::Ge => lhs >= r,
                super::Relation::Gt => lhs > r,
                super::Relation::Eq => lhs == r,
                super::Relation::Ne => lhs != r,
            }
        }
        Condition::In(lo, hi) => (*lo as i128..=*hi as i128).contains(&lhs),
    })
}

fn all_distinct(vals: &[i64]) -> bool {
    let mut seen = HashSet::with_capacity(vals.len());
    vals.iter().all(|x| seen.insert(*x))
}

fn rectangular(m: &[Vec<String>]) -> Result<usize, CheckError> {
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(mismatch("matrix rows have different lengths"));
    }
    Ok(cols)
}

fn columns(m: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

fn chain_lex(op: OrderOp, lists: &[Vec<i64>]) -> bool {
    lists.windows(2).all(|w| op.holds_lex(&w[0], &w[1]))
}

/// Successor values form a permutation of `0..n` whose non-trivial cycles
/// number exactly one.
pub(crate) fn is_single_circuit(succ: &[i64]) -> bool {
    let n = succ.len();
    if succ.iter().any(|&s| s < 0 || s as usize >= n) || !all_distinct(succ) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for i in 0..n {
        if seen[i] || succ[i] as usize == i {
            continue;
        }
        cycles += 1;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = succ[j] as usize;
        }
    }
    cycles == 1
}

/// `A` and `B` are mutually inverse: every `A[i]` indexes `B` with
/// `B[A[i]] = i`, and symmetrically when both lists have the same length.
pub(crate) fn is_channel(a: &[i64], b: &[i64]) -> bool {
    let inverse = |a: &[i64], b: &[i64]| {
        a.iter().enumerate().all(|(i, &j)| {
            j >= 0 && (j as usize) < b.len() && b[j as usize] == i as i64
        })
    };
    inverse(a, b) && (a.len() != b.len() || inverse(b, a))
}

/// Whether `c` holds under `v`. Every variable of the scope must be bound.
pub fn constraint_satisfied(
    c: &Constraint,
    v: &(impl Valuation + ?Sized),
) -> Result<bool, CheckError> {
    Ok(match c {
        Constraint::Intension(e) => e.evaluate(v)? != 0,
        Constraint::Extension { scope, table } => {
            if table.arity() != scope.len() {
                return Err(mismatch(format!(
                    "table arity {} over {} variables",
                    table.arity(),
                    scope.len()
                )));
            }
            table.accepts(&values(v, scope)?)
        }
        Constraint::Regular { scope, automaton } => automaton.accepts(&values(v, scope)?),
        Constraint::AllDifferent(scope) => all_distinct(&values(v, scope)?),
        Constraint::AllDifferentMatrix(m) => {
            let cols = rectangular(m)?;
            let rows = m.iter().map(|r| values(v, r)).collect::<Result<Vec<_>, _>>()?;
            rows.iter().all(|r| all_distinct(r))
                && columns(&rows, cols).iter().all(|c| all_distinct(c))
        }
        Constraint::Ordered { scope, op } => values(v, scope)?
            .windows(2)
            .all(|w| op.holds(w[0], w[1])),
        Constraint::Lex { lists, op } => {
            rectangular(lists)?;
            let rows = lists.iter().map(|r| values(v, r)).collect::<Result<Vec<_>, _>>()?;
            chain_lex(*op, &rows)
        }
        Constraint::LexMatrix { matrix, op } => {
            let cols = rectangular(matrix)?;
            let rows = matrix.iter().map(|r| values(v, r)).collect::<Result<Vec<_>, _>>()?;
            chain_lex(*op, &rows) && chain_lex(*op, &columns(&rows, cols))
        }
        Constraint::Sum {
            scope,
            coeffs,
            condition,
        } => {
            if coeffs.len() != scope.len() {
                return Err(mismatch("coefficient count differs from scope length"));
            }
            let mut total: i128 = 0;
            for (x, c) in scope.iter().zip(coeffs) {
                total += value(v, x)? as i128 * operand(v, c)? as i128;
            }
            condition_holds(v, total, condition)?
        }
        Constraint::Count {
            scope,
            values: targets,
            condition,
        } => {
            let n = values(v, scope)?
                .iter()
                .filter(|x| targets.contains(x))
                .count();
            condition_holds(v, n as i128, condition)?
        }
        Constraint::Cardinality {
            scope,
            values: vals,
            occurs,
            closed,
        } => {
            if vals.len() != occurs.len() {
                return Err(mismatch("occurs count differs from value count"));
            }
            let xs = values(v, scope)?;
            let counts_ok = vals.iter().zip(occurs).all(|(val, occ)| {
                let n = xs.iter().filter(|x| *x == val).count() as i64;
                let (lo, hi) = occ.bounds();
                lo <= n && n <= hi
            });
            counts_ok && (!closed || xs.iter().all(|x| vals.contains(x)))
        }
        Constraint::Element {
            list,
            index,
            value: target,
        } => {
            let xs = values(v, list)?;
            let i = value(v, index)?;
            let t = operand(v, target)?;
            i >= 0 && (i as usize) < xs.len() && xs[i as usize] == t
        }
        Constraint::Channel { first, second } => {
            if first.len() > second.len() {
                return Err(mismatch("first channel list is longer than the second"));
            }
            is_channel(&values(v, first)?, &values(v, second)?)
        }
        Constraint::NoOverlap { origins, lengths } => {
            if origins.len() != lengths.len() {
                return Err(mismatch("origin count differs from length count"));
            }
            let mut boxes = Vec::with_capacity(origins.len());
            for ((x, y), (w, h)) in origins.iter().zip(lengths) {
                boxes.push((
                    value(v, x)? as i128,
                    value(v, y)? as i128,
                    operand(v, w)? as i128,
                    operand(v, h)? as i128,
                ));
            }
            boxes.iter().enumerate().all(|(i, a)| {
                boxes[i + 1..].iter().all(|b| {
                    a.0 + a.2 <= b.0 || b.0 + b.2 <= a.0 || a.1 + a.3 <= b.1 || b.1 + b.3 <= a.1
                })
            })
        }
        Constraint::Cumulative {
            origins,
            lengths,
            heights,
            limit,
        } => {
            if origins.len() != lengths.len() || origins.len() != heights.len() {
                return Err(mismatch("origins, lengths and heights differ in length"));
            }
            let starts = values(v, origins)?;
            // the load only increases at task starts
            starts.iter().all(|&t| {
                let load: i128 = (0..starts.len())
                    .filter(|&i| starts[i] <= t && (t as i128) < starts[i] as i128 + lengths[i] as i128)
                    .map(|i| heights[i] as i128)
                    .sum();
                load <= *limit as i128
            })
        }
        Constraint::Circuit(scope) => is_single_circuit(&values(v, scope)?),
        Constraint::Instantiation {
            scope,
            values: fixed,
        } => {
            if scope.len() != fixed.len() {
                return Err(mismatch("value count differs from scope length"));
            }
            values(v, scope)? == *fixed
        }
        Constraint::Slide(s) => {
            for w in s.windows() {
                if !constraint_satisfied(&w, v)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

/// Objective value of a total assignment.
pub fn assignment_cost(
    instance: &Instance,
    v: &(impl Valuation + ?Sized),
) -> Result<i64, CheckError> {
    let obj = instance
        .objective
        .as_ref()
        .ok_or(CheckError::NotAnOptimizationInstance)?;
    let overflow = || CheckError::Eval(EvalError::Overflow("objective"));
    match &obj.target {
        ObjectiveTarget::Variable(x) => value(v, x),
        ObjectiveTarget::Sum { scope, coeffs } => {
            if coeffs.len() != scope.len() {
                return Err(mismatch("coefficient count differs from scope length"));
            }
            let mut total: i128 = 0;
            for (x, c) in scope.iter().zip(coeffs) {
                total += value(v, x)? as i128 * *c as i128;
            }
            i64::try_from(total).map_err(|_| overflow())
        }
        ObjectiveTarget::Maximum(scope) => values(v, scope)?
            .into_iter()
            .max()
            .ok_or_else(|| mismatch("maximum over an empty list")),
    }
}
