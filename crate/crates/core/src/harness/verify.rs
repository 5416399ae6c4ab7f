use std::fmt;

use crate::model::{assignment_cost, constraint_satisfied, Assignment, Instance, Kind};

/// Outcome of checking a claimed solution. Failures name the first
/// offending variable or constraint, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// An instance variable has no value.
    Incomplete(String),
    /// The assignment names a variable the instance does not declare.
    UnknownVariable(String),
    OutOfDomain { variable: String, value: i64 },
    Violated { constraint: usize },
    /// The checker could not evaluate the constraint (arithmetic overflow).
    Undefined { constraint: usize, reason: String },
    CostMismatch { actual: i64, claimed: i64 },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => f.write_str("VALID"),
            Verdict::Incomplete(v) => write!(f, "Incomplete({v})"),
            Verdict::UnknownVariable(v) => write!(f, "UnknownVariable({v})"),
            Verdict::OutOfDomain { variable, value } => {
                write!(f, "OutOfDomain({variable} = {value})")
            }
            Verdict::Violated { constraint } => write!(f, "Violated(constraint {constraint})"),
            Verdict::Undefined { constraint, reason } => {
                write!(f, "Undefined(constraint {constraint}: {reason})")
            }
            Verdict::CostMismatch { actual, claimed } => {
                write!(f, "CostMismatch({actual} vs {claimed})")
            }
        }
    }
}

/// Checks totality, domains, every constraint and, for a COP with a
/// claimed bound, the objective value.
pub fn verify(instance: &Instance, assignment: &Assignment, claimed: Option<i64>) -> Verdict {
    for v in &instance.variables {
        if assignment.get(&v.id).is_none() {
            return Verdict::Incomplete(v.id.clone());
        }
    }
    if assignment.len() != instance.variables.len() {
        if let Some((id, _)) = assignment.iter().find(|(id, _)| instance.variable(id).is_none()) {
            return Verdict::UnknownVariable(id.to_string());
        }
    }
    for v in &instance.variables {
        let value = assignment.get(&v.id).expect("checked total");
        if !v.domain.contains(value) {
            return Verdict::OutOfDomain {
                variable: v.id.clone(),
                value,
            };
        }
    }
    for (i, c) in instance.constraints.iter().enumerate() {
        match constraint_satisfied(c, assignment) {
            Ok(true) => {}
            Ok(false) => return Verdict::Violated { constraint: i },
            Err(e) => {
                return Verdict::Undefined {
                    constraint: i,
                    reason: e.to_string(),
                }
            }
        }
    }
    if let (Kind::Cop, Some(claimed)) = (instance.kind, claimed) {
        match assignment_cost(instance, assignment) {
            Ok(actual) if actual == claimed => {}
            Ok(actual) => return Verdict::CostMismatch { actual, claimed },
            Err(e) => {
                return Verdict::Undefined {
                    constraint: instance.constraints.len(),
                    reason: e.to_string(),
                }
            }
        }
    }
    Verdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dsl::*;
    use crate::model::{Domain, Variable};

    fn pair() -> Instance {
        Instance::new(
            vec![
                Variable::new("x", Domain::range(0, 2)),
                Variable::new("y", Domain::range(0, 2)),
            ],
            vec![crate::model::Constraint::Intension(lt(var("x"), var("y")))],
        )
    }

    fn a(pairs: &[(&str, i64)]) -> Assignment {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn verdicts() {
        let i = pair();
        assert_eq!(verify(&i, &a(&[("x", 0), ("y", 1)]), None), Verdict::Valid);
        assert_eq!(verify(&i, &a(&[("x", 0)]), None), Verdict::Incomplete("y".into()));
        assert_eq!(
            verify(&i, &a(&[("x", 0), ("y", 1), ("z", 0)]), None),
            Verdict::UnknownVariable("z".into())
        );
        assert_eq!(
            verify(&i, &a(&[("x", 0), ("y", 5)]), None),
            Verdict::OutOfDomain {
                variable: "y".into(),
                value: 5
            }
        );
        assert_eq!(
            verify(&i, &a(&[("x", 1), ("y", 1)]), None),
            Verdict::Violated { constraint: 0 }
        );
    }
}
