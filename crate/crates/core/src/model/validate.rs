use std::collections::{HashMap, HashSet};
use std::fmt;

use super::constraint::{placeholder_index, Automaton, Condition, Constraint, Operand};
use super::domain::Domain;
use super::expr::{Expr, Op};
use super::instance::{Instance, Kind, ObjectiveTarget};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    KindMismatch { kind: Kind, has_objective: bool },
    DuplicateVariable(String),
    InvalidIdentifier(String),
    EmptyDomain(String),
    UnknownVariable(String),
    ScopeMismatch(String),
    NonRectangular,
    InvalidCondition(String),
    InvalidExpression(String),
    NonDeterministicAutomaton { state: String, symbol: i64 },
    UnreachableFinalState(String),
    DecisionNotSubset(String),
    BoundOverflow,
}

/// One violated invariant. `constraint` is the index of the offending
/// constraint, when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub constraint: Option<usize>,
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.constraint {
            write!(f, "constraint {i}: ")?;
        }
        match &self.kind {
            IssueKind::KindMismatch {
                kind,
                has_objective,
            } => write!(
                f,
                "kind {} {} an objective",
                kind.name(),
                if *has_objective { "with" } else { "without" }
            ),
            IssueKind::DuplicateVariable(id) => write!(f, "variable `{id}` declared twice"),
            IssueKind::InvalidIdentifier(id) => write!(f, "invalid identifier `{id}`"),
            IssueKind::EmptyDomain(id) => write!(f, "variable `{id}` has an empty domain"),
            IssueKind::UnknownVariable(id) => write!(f, "unknown variable `{id}`"),
            IssueKind::ScopeMismatch(why) => write!(f, "scope mismatch: {why}"),
            IssueKind::NonRectangular => f.write_str("matrix is not rectangular"),
            IssueKind::InvalidCondition(why) => write!(f, "invalid condition: {why}"),
            IssueKind::InvalidExpression(why) => write!(f, "invalid expression: {why}"),
            IssueKind::NonDeterministicAutomaton { state, symbol } => {
                write!(f, "automaton has two transitions from `{state}` on {symbol}")
            }
            IssueKind::UnreachableFinalState(q) => write!(f, "final state `{q}` is unreachable"),
            IssueKind::DecisionNotSubset(id) => {
                write!(f, "decision variable `{id}` is not declared")
            }
            IssueKind::BoundOverflow => f.write_str("arithmetic may exceed 64-bit integers"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// `[A-Za-z][A-Za-z0-9_]*` followed by any number of `[<digits>]`.
pub fn is_valid_identifier(id: &str) -> bool {
    let stem_end = id.find('[').unwrap_or(id.len());
    let (stem, mut rest) = id.split_at(stem_end);
    let mut chars = stem.chars();
    if !chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return false;
    }
    while !rest.is_empty() {
        let Some(close) = rest.find(']') else {
            return false;
        };
        let digits = &rest[1..close];
        if !rest.starts_with('[') || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return false;
        }
        rest = &rest[close + 1..];
    }
    true
}

const LIMIT: i128 = i64::MAX as i128;

fn fits(lo: i128, hi: i128) -> bool {
    lo >= -LIMIT && hi <= LIMIT
}

struct Checker<'a> {
    domains: HashMap<&'a str, &'a Domain>,
    issues: Vec<Issue>,
}

impl<'a> Checker<'a> {
    fn push(&mut self, constraint: Option<usize>, kind: IssueKind) {
        self.issues.push(Issue { constraint, kind });
    }

    fn bounds(&self, id: &str) -> Option<(i128, i128)> {
        let d = self.domains.get(id)?;
        Some((d.min()? as i128, d.max()? as i128))
    }

    fn operand_bounds(&self, op: &Operand) -> Option<(i128, i128)> {
        match op {
            Operand::Const(c) => Some((*c as i128, *c as i128)),
            Operand::Var(id) => self.bounds(id),
        }
    }

    /// Interval of `e`; `None` when a variable is unknown or an
    /// intermediate value leaves the 64-bit range.
    fn expr_bounds(&self, e: &Expr) -> Option<(i128, i128)> {
        let (lo, hi) = match e {
            Expr::Const(c) => (*c as i128, *c as i128),
            Expr::Var(id) => self.bounds(id)?,
            Expr::Op(op, children) => {
                let b = children
                    .iter()
                    .map(|c| self.expr_bounds(c))
                    .collect::<Option<Vec<_>>>()?;
                if op.is_boolean() {
                    return Some((0, 1));
                }
                match op {
                    Op::Neg => (-b[0].1, -b[0].0),
                    Op::Abs | Op::Dist => {
                        let (lo, hi) = if *op == Op::Dist {
                            (b[0].0 - b[1].1, b[0].1 - b[1].0)
                        } else {
                            b[0]
                        };
                        let m = lo.abs().max(hi.abs());
                        (if lo <= 0 && hi >= 0 { 0 } else { lo.abs().min(hi.abs()) }, m)
                    }
                    Op::Add => b.iter().fold((0, 0), |a, x| (a.0 + x.0, a.1 + x.1)),
                    Op::Sub => (b[0].0 - b[1].1, b[0].1 - b[1].0),
                    Op::Mul => {
                        let mut acc = (1i128, 1i128);
                        for x in &b {
                            let p = [acc.0 * x.0, acc.0 * x.1, acc.1 * x.0, acc.1 * x.1];
                            acc = (*p.iter().min()?, *p.iter().max()?);
                            if !fits(acc.0, acc.1) {
                                return None;
                            }
                        }
                        acc
                    }
                    _ => unreachable!("boolean operators handled above"),
                }
            }
        };
        fits(lo, hi).then_some((lo, hi))
    }

    fn known(&mut self, idx: Option<usize>, id: &str) {
        if !self.domains.contains_key(id) {
            self.push(idx, IssueKind::UnknownVariable(id.to_string()));
        }
    }

    fn rectangular(&mut self, idx: usize, m: &[Vec<String>]) {
        let cols = m.first().map_or(0, Vec::len);
        if m.iter().any(|r| r.len() != cols) {
            self.push(Some(idx), IssueKind::NonRectangular);
        }
    }

    fn condition(&mut self, idx: usize, cond: &Condition) {
        if let Condition::In(lo, hi) = cond {
            if lo > hi {
                self.push(
                    Some(idx),
                    IssueKind::InvalidCondition(format!("empty interval {lo}..{hi}")),
                );
            }
        }
    }

    fn automaton(&mut self, idx: usize, a: &Automaton) {
        let mut keys = HashSet::new();
        for t in &a.transitions {
            if !keys.insert((t.from.as_str(), t.symbol)) {
                self.push(
                    Some(idx),
                    IssueKind::NonDeterministicAutomaton {
                        state: t.from.clone(),
                        symbol: t.symbol,
                    },
                );
            }
        }
        let mut reached: HashSet<&str> = HashSet::from([a.start.as_str()]);
        let mut frontier = vec![a.start.as_str()];
        while let Some(q) = frontier.pop() {
            for t in a.transitions.iter().filter(|t| t.from == q) {
                if reached.insert(&t.to) {
                    frontier.push(&t.to);
                }
            }
        }
        for f in &a.finals {
            if !reached.contains(f.as_str()) {
                self.push(Some(idx), IssueKind::UnreachableFinalState(f.clone()));
            }
        }
    }

    fn mismatch(&mut self, idx: usize, why: &str) {
        self.push(Some(idx), IssueKind::ScopeMismatch(why.to_string()));
    }

    fn constraint(&mut self, idx: usize, c: &Constraint) {
        if let Constraint::Slide(s) = c {
            if s.offset == 0 {
                self.mismatch(idx, "slide offset must be positive");
            }
            let arity = s.window_arity();
            if arity == 0 || arity > s.list.len() {
                self.mismatch(idx, "slide window does not fit the list");
            }
            for id in &s.list {
                self.known(Some(idx), id);
            }
            if matches!(*s.template, Constraint::Slide(_)) {
                self.mismatch(idx, "nested slide");
            }
            for w in s.windows() {
                self.constraint(idx, &w);
            }
            return;
        }
        for id in c.scope() {
            if placeholder_index(id).is_some() {
                self.push(Some(idx), IssueKind::UnknownVariable(id.to_string()));
            } else {
                self.known(Some(idx), id);
            }
        }
        match c {
            Constraint::Intension(e) => {
                if let Some((op, n)) = e.arity_violation() {
                    self.push(
                        Some(idx),
                        IssueKind::InvalidExpression(format!("{} with {n} operands", op.name())),
                    );
                } else if !e.is_boolean() {
                    self.push(
                        Some(idx),
                        IssueKind::InvalidExpression("root is not a predicate".into()),
                    );
                } else if self.expr_bounds(e).is_none() && c.scope().iter().all(|v| self.domains.contains_key(v)) {
                    self.push(Some(idx), IssueKind::BoundOverflow);
                }
            }
            Constraint::Extension { scope, table } => {
                if table.arity() != scope.len() {
                    self.mismatch(
                        idx,
                        &format!("table arity {} over {} variables", table.arity(), scope.len()),
                    );
                }
            }
            Constraint::Regular { automaton, .. } => self.automaton(idx, automaton),
            Constraint::AllDifferentMatrix(m) | Constraint::LexMatrix { matrix: m, .. } => {
                self.rectangular(idx, m)
            }
            Constraint::Lex { lists, .. } => self.rectangular(idx, lists),
            Constraint::Sum {
                scope,
                coeffs,
                condition,
            } => {
                if coeffs.len() != scope.len() {
                    self.mismatch(idx, "coefficient count differs from scope length");
                }
                self.condition(idx, condition);
                let mut total = (0i128, 0i128);
                for (x, c) in scope.iter().zip(coeffs) {
                    let (Some(a), Some(b)) = (self.bounds(x), self.operand_bounds(c)) else {
                        return;
                    };
                    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
                    total.0 += p.iter().min().unwrap();
                    total.1 += p.iter().max().unwrap();
                }
                if !fits(total.0, total.1) {
                    self.push(Some(idx), IssueKind::BoundOverflow);
                }
            }
            Constraint::Count { condition, .. } => self.condition(idx, condition),
            Constraint::Cardinality { values, occurs, .. } => {
                if values.len() != occurs.len() {
                    self.mismatch(idx, "occurs count differs from value count");
                }
                if occurs.iter().any(|o| {
                    let (lo, hi) = o.bounds();
                    lo > hi
                }) {
                    self.push(
                        Some(idx),
                        IssueKind::InvalidCondition("occurrence bounds are empty".into()),
                    );
                }
            }
            Constraint::Element { list, .. } => {
                if list.is_empty() {
                    self.mismatch(idx, "element over an empty list");
                }
            }
            Constraint::Channel { first, second } => {
                if first.len() > second.len() {
                    self.mismatch(idx, "first channel list is longer than the second");
                }
            }
            Constraint::NoOverlap { origins, lengths } => {
                if origins.len() != lengths.len() {
                    self.mismatch(idx, "origin count differs from length count");
                }
            }
            Constraint::Cumulative {
                origins,
                lengths,
                heights,
                ..
            } => {
                if origins.len() != lengths.len() || origins.len() != heights.len() {
                    self.mismatch(idx, "origins, lengths and heights differ in length");
                } else if lengths.iter().chain(heights).any(|&v| v < 0) {
                    self.mismatch(idx, "negative task length or height");
                } else if heights.iter().map(|&h| h as i128).sum::<i128>() > LIMIT {
                    self.push(Some(idx), IssueKind::BoundOverflow);
                }
            }
            Constraint::Instantiation { scope, values } => {
                if scope.len() != values.len() {
                    self.mismatch(idx, "value count differs from scope length");
                }
            }
            Constraint::AllDifferent(_)
            | Constraint::Ordered { .. }
            | Constraint::Circuit(_)
            | Constraint::Slide(_) => {}
        }
    }
}

/// Lists every violated model invariant; empty for a well-formed instance.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut ck = Checker {
        domains: HashMap::new(),
        issues: Vec::new(),
    };
    for v in &instance.variables {
        if !is_valid_identifier(&v.id) {
            ck.push(None, IssueKind::InvalidIdentifier(v.id.clone()));
        }
        if v.domain.is_empty() {
            ck.push(None, IssueKind::EmptyDomain(v.id.clone()));
        }
        if ck.domains.insert(&v.id, &v.domain).is_some() {
            ck.push(None, IssueKind::DuplicateVariable(v.id.clone()));
        }
    }
    let has_objective = instance.objective.is_some();
    if (instance.kind == Kind::Cop) != has_objective {
        ck.push(
            None,
            IssueKind::KindMismatch {
                kind: instance.kind,
                has_objective,
            },
        );
    }
    for (i, c) in instance.constraints.iter().enumerate() {
        ck.constraint(i, c);
    }
    if let Some(obj) = &instance.objective {
        for id in obj.target.scope() {
            ck.known(None, id);
        }
        match &obj.target {
            ObjectiveTarget::Sum { scope, coeffs } => {
                if scope.len() != coeffs.len() {
                    ck.push(
                        None,
                        IssueKind::ScopeMismatch(
                            "objective coefficient count differs from scope length".into(),
                        ),
                    );
                }
                let mut total = (0i128, 0i128);
                for (x, &c) in scope.iter().zip(coeffs) {
                    if let Some((lo, hi)) = ck.bounds(x) {
                        let (a, b) = (lo * c as i128, hi * c as i128);
                        total.0 += a.min(b);
                        total.1 += a.max(b);
                    }
                }
                if !fits(total.0, total.1) {
                    ck.push(None, IssueKind::BoundOverflow);
                }
            }
            ObjectiveTarget::Maximum(scope) if scope.is_empty() => ck.push(
                None,
                IssueKind::ScopeMismatch("objective maximum over an empty list".into()),
            ),
            _ => {}
        }
    }
    if let Some(dec) = &instance.decision {
        for id in dec {
            if !ck.domains.contains_key(id.as_str()) {
                ck.push(None, IssueKind::DecisionNotSubset(id.clone()));
            }
        }
    }
    ValidationReport { issues: ck.issues }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{Objective, Sense, Table, Variable};

    fn bin(id: &str) -> Variable {
        Variable::new(id, Domain::range(0, 1))
    }

    #[test]
    fn identifiers() {
        for ok in ["x", "x[2][3]", "ab_9", "q[10]"] {
            assert!(is_valid_identifier(ok), "{ok}");
        }
        for bad in ["", "9x", "x[", "x[]", "x[a]", "x]", "_x", "x[1]y"] {
            assert!(!is_valid_identifier(bad), "{bad}");
        }
    }

    #[test]
    fn table_arity_mismatch() {
        let inst = Instance::new(
            vec![bin("a"), bin("b")],
            vec![Constraint::Extension {
                scope: vec!["a".into(), "b".into()],
                table: Arc::new(Table::supports(3, vec![vec![0, 0, 0]])),
            }],
        );
        let r = validate_instance(&inst);
        assert_eq!(r.issues.len(), 1);
        assert_eq!(r.issues[0].constraint, Some(0));
        assert!(matches!(r.issues[0].kind, IssueKind::ScopeMismatch(_)));
    }

    #[test]
    fn objective_without_cop_kind() {
        let mut inst = Instance::new(vec![bin("a")], vec![]).with_objective(Objective {
            sense: Sense::Minimize,
            target: ObjectiveTarget::Variable("a".into()),
        });
        assert!(validate_instance(&inst).is_empty());
        inst.kind = Kind::Csp;
        let r = validate_instance(&inst);
        assert!(matches!(r.issues[0].kind, IssueKind::KindMismatch { .. }));
    }

    #[test]
    fn overflow_detected() {
        let big = Variable::new("x", Domain::new([0, i64::MAX / 2]));
        let inst = Instance::new(
            vec![big],
            vec![Constraint::Intension(crate::model::dsl::eq(
                crate::model::dsl::mul(Expr::var("x"), Expr::Const(4)),
                Expr::Const(0),
            ))],
        );
        let r = validate_instance(&inst);
        assert_eq!(r.issues[0].kind, IssueKind::BoundOverflow);
    }
}
