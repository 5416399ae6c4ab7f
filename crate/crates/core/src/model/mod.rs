//! Instance data model and the ground-truth checkers.
//!
//! Every other module is tested against [`constraint_satisfied`] and
//! [`assignment_cost`]: propagators, the parser and the generators must
//! agree with these definitions.

mod check;
mod constraint;
mod domain;
mod expr;
mod instance;
mod table;
mod validate;

use std::collections::BTreeMap;

pub use check::{assignment_cost, constraint_satisfied, CheckError};
pub use constraint::{
    placeholder_index, Automaton, Condition, Constraint, ConstraintKind, Occurs, Operand,
    OrderOp, Relation, Slide, Transition,
};
pub use domain::Domain;
pub use expr::{apply, dsl, Arity, EvalError, Expr, Op};
pub use instance::{Instance, Kind, Objective, ObjectiveTarget, Sense, Variable};
pub use table::{Cell, Polarity, Table, TableError};
pub use validate::{is_valid_identifier, validate_instance, Issue, IssueKind, ValidationReport};

/// Read access to variable values by identifier.
pub trait Valuation {
    fn value_of(&self, id: &str) -> Option<i64>;
}

impl<V: Valuation + ?Sized> Valuation for &V {
    fn value_of(&self, id: &str) -> Option<i64> {
        (**self).value_of(id)
    }
}

impl Valuation for BTreeMap<String, i64> {
    fn value_of(&self, id: &str) -> Option<i64> {
        self.get(id).copied()
    }
}

impl Valuation for std::collections::HashMap<String, i64> {
    fn value_of(&self, id: &str) -> Option<i64> {
        self.get(id).copied()
    }
}

/// A map from variable identifiers to values. Iteration is in identifier
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(BTreeMap<String, i64>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn get(&self, id: &str) -> Option<i64> {
        self.0.get(id).copied()
    }

    pub fn insert(&mut self, id: impl Into<String>, value: i64) -> Option<i64> {
        self.0.insert(id.into(), value)
    }

    pub fn remove(&mut self, id: &str) -> Option<i64> {
        self.0.remove(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Values of `ids` in order; `None` if any is unbound.
    pub fn values_of<S: AsRef<str>>(&self, ids: &[S]) -> Option<Vec<i64>> {
        ids.iter().map(|id| self.get(id.as_ref())).collect()
    }
}

impl Valuation for Assignment {
    fn value_of(&self, id: &str) -> Option<i64> {
        self.get(id)
    }
}

impl<S: Into<String>> FromIterator<(S, i64)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (S, i64)>>(iter: T) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl<S: Into<String>> Extend<(S, i64)> for Assignment {
    fn extend<T: IntoIterator<Item = (S, i64)>>(&mut self, iter: T) {
        self.0.extend(iter.into_iter().map(|(k, v)| (k.into(), v)))
    }
}
