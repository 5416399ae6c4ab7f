//! Per-constraint filtering procedures.
//!
//! A propagator only removes values it proves to have no support under
//! the current domains. Final correctness never depends on filtering
//! strength: search also checks every constraint on total assignments.

mod alldiff;
mod element;
mod intension;
mod order;
mod regular;
mod schedule;
mod sum;
mod table;

use std::collections::HashMap;

use super::store::{Conflict, DomainStore, VarId};
use crate::model::{Condition, Constraint, Instance, ObjectiveTarget, Operand, OrderOp, Sense};

pub(crate) use sum::ObjectiveBound;

pub(crate) type Outcome = Result<(), Conflict>;

pub(crate) trait Propagator {
    /// Variables whose changes wake this propagator.
    fn scope(&self) -> Vec<VarId>;

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome;
}

/// Either a variable or a constant, resolved against the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Factor {
    Const(i64),
    Var(VarId),
}

impl Factor {
    pub fn bounds(self, s: &DomainStore) -> (i64, i64) {
        match self {
            Factor::Const(c) => (c, c),
            Factor::Var(v) => (s.min(v), s.max(v)),
        }
    }

    pub fn value(self, s: &DomainStore) -> Option<i64> {
        match self {
            Factor::Const(c) => Some(c),
            Factor::Var(v) => s.value(v),
        }
    }

    pub fn var(self) -> Option<VarId> {
        match self {
            Factor::Const(_) => None,
            Factor::Var(v) => Some(v),
        }
    }
}

pub(crate) struct Compiler<'a> {
    index: HashMap<&'a str, VarId>,
}

/// A propagator that always fails; used for constraints that can never
/// hold, such as a variable-free false predicate.
struct Fail;

impl Propagator for Fail {
    fn scope(&self) -> Vec<VarId> {
        Vec::new()
    }

    fn propagate(&mut self, _: &mut DomainStore) -> Outcome {
        Err(Conflict)
    }
}

impl<'a> Compiler<'a> {
    pub fn new(instance: &'a Instance) -> Compiler<'a> {
        Compiler {
            index: instance.index_map(),
        }
    }

    pub fn var(&self, id: &str) -> VarId {
        self.index[id]
    }

    fn vars(&self, ids: &[String]) -> Vec<VarId> {
        ids.iter().map(|id| self.var(id)).collect()
    }

    fn factor(&self, op: &Operand) -> Factor {
        match op {
            Operand::Const(c) => Factor::Const(*c),
            Operand::Var(id) => Factor::Var(self.var(id)),
        }
    }

    pub fn compile(
        &self,
        c: &Constraint,
        s: &mut DomainStore,
        out: &mut Vec<Box<dyn Propagator>>,
    ) {
        match c {
            Constraint::Intension(e) => {
                let prog = intension::ExprProg::compile(e, &|id| self.var(id));
                out.push(intension::build(prog, s));
            }
            Constraint::Extension { scope, table } => {
                out.push(table::build(&self.vars(scope), table, s));
            }
            Constraint::Regular { scope, automaton } => {
                out.push(Box::new(regular::Regular::new(self.vars(scope), automaton, s)));
            }
            Constraint::AllDifferent(scope) => {
                out.push(Box::new(alldiff::AllDifferent::new(self.vars(scope))));
            }
            Constraint::AllDifferentMatrix(m) => {
                let cols = m.first().map_or(0, Vec::len);
                for row in m {
                    out.push(Box::new(alldiff::AllDifferent::new(self.vars(row))));
                }
                for j in 0..cols {
                    let col: Vec<VarId> = m.iter().map(|r| self.var(&r[j])).collect();
                    out.push(Box::new(alldiff::AllDifferent::new(col)));
                }
            }
            Constraint::Ordered { scope, op } => {
                out.push(Box::new(order::Ordered::new(self.vars(scope), *op)));
            }
            Constraint::Lex { lists, op } => {
                let rows: Vec<Vec<VarId>> = lists.iter().map(|l| self.vars(l)).collect();
                lex_chain(&rows, *op, out);
            }
            Constraint::LexMatrix { matrix, op } => {
                let rows: Vec<Vec<VarId>> = matrix.iter().map(|l| self.vars(l)).collect();
                let cols = rows.first().map_or(0, Vec::len);
                let columns: Vec<Vec<VarId>> = (0..cols)
                    .map(|j| rows.iter().map(|r| r[j]).collect())
                    .collect();
                lex_chain(&rows, *op, out);
                lex_chain(&columns, *op, out);
            }
            Constraint::Sum {
                scope,
                coeffs,
                condition,
            } => {
                let terms = scope
                    .iter()
                    .zip(coeffs)
                    .map(|(x, c)| (self.factor(c), self.var(x)))
                    .collect();
                out.push(Box::new(sum::Linear::new(terms, self.condition(condition))));
            }
            Constraint::Count {
                scope,
                values,
                condition,
            } => {
                out.push(Box::new(sum::Count::new(
                    self.vars(scope),
                    values.clone(),
                    self.condition(condition),
                )));
            }
            Constraint::Cardinality {
                scope,
                values,
                occurs,
                closed,
            } => {
                let vars = self.vars(scope);
                for (v, occ) in values.iter().zip(occurs) {
                    let (lo, hi) = occ.bounds();
                    out.push(Box::new(sum::Count::new(
                        vars.clone(),
                        vec![*v],
                        sum::Cond::Range(Some(lo as i128), Some(hi as i128)),
                    )));
                }
                if *closed {
                    out.push(Box::new(element::Member::new(vars, values.clone())));
                }
            }
            Constraint::Element { list, index, value } => {
                out.push(Box::new(element::Element::new(
                    self.vars(list),
                    self.var(index),
                    self.factor(value),
                )));
            }
            Constraint::Channel { first, second } => {
                out.push(Box::new(element::Channel::new(
                    self.vars(first),
                    self.vars(second),
                )));
            }
            Constraint::NoOverlap { origins, lengths } => {
                let boxes = origins
                    .iter()
                    .zip(lengths)
                    .map(|((x, y), (w, h))| {
                        [
                            Factor::Var(self.var(x)),
                            Factor::Var(self.var(y)),
                            self.factor(w),
                            self.factor(h),
                        ]
                    })
                    .collect();
                out.push(Box::new(schedule::NoOverlap::new(boxes)));
            }
            Constraint::Cumulative {
                origins,
                lengths,
                heights,
                limit,
            } => {
                out.push(Box::new(schedule::Cumulative::new(
                    self.vars(origins),
                    lengths.clone(),
                    heights.clone(),
                    *limit,
                )));
            }
            Constraint::Circuit(scope) => {
                let vars = self.vars(scope);
                out.push(Box::new(alldiff::AllDifferent::new(vars.clone())));
                out.push(Box::new(alldiff::Circuit::new(vars)));
            }
            Constraint::Instantiation { scope, values } => {
                out.push(Box::new(element::Fix::new(self.vars(scope), values.clone())));
            }
            Constraint::Slide(slide) => {
                for w in slide.windows() {
                    self.compile(&w, s, out);
                }
            }
        }
    }

    fn condition(&self, c: &Condition) -> sum::Cond {
        use crate::model::Relation::*;
        match c {
            Condition::In(lo, hi) => sum::Cond::Range(Some(*lo as i128), Some(*hi as i128)),
            Condition::Cmp(rel, Operand::Const(k)) => {
                let k = *k as i128;
                match rel {
                    Lt => sum::Cond::Range(None, Some(k - 1)),
                    Le => sum::Cond::Range(None, Some(k)),
                    Ge => sum::Cond::Range(Some(k), None),
                    Gt => sum::Cond::Range(Some(k + 1), None),
                    Eq => sum::Cond::Range(Some(k), Some(k)),
                    Ne => sum::Cond::Ne(k),
                }
            }
            Condition::Cmp(rel, Operand::Var(id)) => sum::Cond::Var(*rel, self.var(id)),
        }
    }

    pub fn objective(&self, target: &ObjectiveTarget, sense: Sense) -> Box<dyn Propagator> {
        match target {
            ObjectiveTarget::Variable(x) => {
                Box::new(ObjectiveBound::Var(self.var(x), sense))
            }
            ObjectiveTarget::Maximum(xs) => Box::new(ObjectiveBound::Max(self.vars(xs), sense)),
            ObjectiveTarget::Sum { scope, coeffs } => {
                let terms = coeffs
                    .iter()
                    .zip(scope)
                    .map(|(c, x)| (Factor::Const(*c), self.var(x)))
                    .collect();
                Box::new(sum::Linear::objective(terms, sense))
            }
        }
    }
}

fn lex_chain(lists: &[Vec<VarId>], op: OrderOp, out: &mut Vec<Box<dyn Propagator>>) {
    for w in lists.windows(2) {
        let (a, b) = if op.is_increasing() {
            (w[0].clone(), w[1].clone())
        } else {
            (w[1].clone(), w[0].clone())
        };
        out.push(Box::new(order::LexPair::new(a, b, op.is_strict())));
    }
}

/// Integer division rounding toward negative infinity.
pub(crate) fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Narrows `x` so that `c * x` lies in `[lo, hi]`; `None` is unbounded.
pub(crate) fn narrow_scaled(
    s: &mut DomainStore,
    x: VarId,
    c: i128,
    lo: Option<i128>,
    hi: Option<i128>,
) -> Outcome {
    if c == 0 {
        if lo.is_some_and(|l| l > 0) || hi.is_some_and(|h| h < 0) {
            return Err(Conflict);
        }
        return Ok(());
    }
    let (lo, hi) = if c > 0 {
        (lo.map(|l| div_ceil(l, c)), hi.map(|h| div_floor(h, c)))
    } else {
        (hi.map(|h| div_ceil(h, c)), lo.map(|l| div_floor(l, c)))
    };
    if let Some(l) = lo {
        s.set_min_i128(x, l)?;
    }
    if let Some(h) = hi {
        s.set_max_i128(x, h)?;
    }
    Ok(())
}

pub(crate) fn fail() -> Box<dyn Propagator> {
    Box::new(Fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_division() {
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_ceil(7, 2), 4);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, -2), -3);
        assert_eq!(div_floor(7, -2), -4);
        assert_eq!(div_floor(6, 3), 2);
    }
}
