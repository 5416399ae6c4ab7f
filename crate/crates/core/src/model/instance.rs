use std::collections::HashMap;

use super::constraint::Constraint;
use super::domain::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Csp,
    Cop,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Csp => "CSP",
            Kind::Cop => "COP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub id: String,
    pub domain: Domain,
}

impl Variable {
    pub fn new(id: impl Into<String>, domain: Domain) -> Variable {
        Variable {
            id: id.into(),
            domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Whether `a` is strictly better than `b`.
    pub fn improves(self, a: i64, b: i64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObjectiveTarget {
    Variable(String),
    Sum { scope: Vec<String>, coeffs: Vec<i64> },
    Maximum(Vec<String>),
}

impl ObjectiveTarget {
    pub fn scope(&self) -> Vec<&str> {
        match self {
            ObjectiveTarget::Variable(v) => vec![v.as_str()],
            ObjectiveTarget::Sum { scope, .. } | ObjectiveTarget::Maximum(scope) => {
                scope.iter().map(String::as_str).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Objective {
    pub sense: Sense,
    pub target: ObjectiveTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub kind: Kind,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Objective>,
    pub decision: Option<Vec<String>>,
}

impl Instance {
    pub fn new(variables: Vec<Variable>, constraints: Vec<Constraint>) -> Instance {
        Instance {
            kind: Kind::Csp,
            variables,
            constraints,
            objective: None,
            decision: None,
        }
    }

    /// Sets the objective and switches the kind to COP.
    pub fn with_objective(mut self, objective: Objective) -> Instance {
        self.kind = Kind::Cop;
        self.objective = Some(objective);
        self
    }

    pub fn with_decision(mut self, decision: Vec<String>) -> Instance {
        self.decision = Some(decision);
        self
    }

    pub fn variable(&self, id: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.id == id)
    }

    /// Position of each variable in `variables`.
    pub fn index_map(&self) -> HashMap<&str, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect()
    }
}
