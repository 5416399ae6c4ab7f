use std::sync::Arc;

use crate::model::{
    validate_instance, Condition, Constraint, Domain, Expr, Instance, Objective, Operand,
    Relation, Table, Variable,
};

use super::{GenError, Omit};

/// Incremental instance construction. Variables are declared in call order;
/// constraints tagged as symmetry breaking or redundant are dropped according
/// to `omit`.
pub(crate) struct Builder {
    omit: Omit,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Option<Objective>,
    decision: Option<Vec<String>>,
}

pub(crate) fn id1(stem: &str, i: usize) -> String {
    format!("{stem}[{i}]")
}

pub(crate) fn id2(stem: &str, i: usize, j: usize) -> String {
    format!("{stem}[{i}][{j}]")
}

pub(crate) fn id3(stem: &str, i: usize, j: usize, k: usize) -> String {
    format!("{stem}[{i}][{j}][{k}]")
}

pub(crate) fn column(m: &[Vec<String>], j: usize) -> Vec<String> {
    m.iter().map(|row| row[j].clone()).collect()
}

pub(crate) fn flat(m: &[Vec<String>]) -> Vec<String> {
    m.iter().flatten().cloned().collect()
}

pub(crate) fn ones(n: usize) -> Vec<Operand> {
    vec![Operand::Const(1); n]
}

pub(crate) fn sum(scope: Vec<String>, rel: Relation, rhs: impl Into<Operand>) -> Constraint {
    Constraint::Sum {
        coeffs: ones(scope.len()),
        scope,
        condition: Condition::new(rel, rhs),
    }
}

pub(crate) fn weighted_sum(
    scope: Vec<String>,
    coeffs: Vec<Operand>,
    rel: Relation,
    rhs: impl Into<Operand>,
) -> Constraint {
    Constraint::Sum {
        scope,
        coeffs,
        condition: Condition::new(rel, rhs),
    }
}

pub(crate) fn ext(scope: Vec<String>, table: &Arc<Table>) -> Constraint {
    Constraint::Extension {
        scope,
        table: Arc::clone(table),
    }
}

impl Builder {
    pub(crate) fn new(omit: Omit) -> Builder {
        Builder {
            omit,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: None,
            decision: None,
        }
    }

    pub(crate) fn var(&mut self, id: impl Into<String>, domain: Domain) -> String {
        let id = id.into();
        self.variables.push(Variable::new(id.clone(), domain));
        id
    }

    pub(crate) fn array1(
        &mut self,
        stem: &str,
        n: usize,
        domain: impl Fn(usize) -> Domain,
    ) -> Vec<String> {
        (0..n).map(|i| self.var(id1(stem, i), domain(i))).collect()
    }

    pub(crate) fn array2(
        &mut self,
        stem: &str,
        rows: usize,
        cols: usize,
        domain: impl Fn(usize, usize) -> Domain,
    ) -> Vec<Vec<String>> {
        (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| self.var(id2(stem, i, j), domain(i, j)))
                    .collect()
            })
            .collect()
    }

    /// A 2-D array where only cells with `Some` domain exist.
    pub(crate) fn array2_when(
        &mut self,
        stem: &str,
        rows: usize,
        cols: usize,
        domain: impl Fn(usize, usize) -> Option<Domain>,
    ) -> Vec<Vec<Option<String>>> {
        (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| domain(i, j).map(|d| self.var(id2(stem, i, j), d)))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn post(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub(crate) fn intension(&mut self, e: Expr) {
        self.constraints.push(Constraint::Intension(e));
    }

    pub(crate) fn symmetry(&mut self, c: Constraint) {
        if !self.omit.symmetry {
            self.constraints.push(c);
        }
    }

    pub(crate) fn redundant(&mut self, c: Constraint) {
        if !self.omit.redundant {
            self.constraints.push(c);
        }
    }

    pub(crate) fn objective(&mut self, objective: Objective) {
        self.objective = Some(objective);
    }

    pub(crate) fn decision(&mut self, vars: Vec<String>) {
        if !self.omit.decision {
            self.decision = Some(vars);
        }
    }

    pub(crate) fn finish(self) -> Result<Instance, GenError> {
        let mut instance = Instance::new(self.variables, self.constraints);
        if let Some(o) = self.objective {
            instance = instance.with_objective(o);
        }
        if let Some(d) = self.decision {
            instance = instance.with_decision(d);
        }
        let report = validate_instance(&instance);
        if report.is_empty() {
            Ok(instance)
        } else {
            Err(GenError::BadParameter(report.to_string()))
        }
    }
}
