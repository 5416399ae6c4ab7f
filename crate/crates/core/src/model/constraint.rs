use std::fmt;
use std::sync::Arc;

use super::expr::Expr;
use super::table::Table;

/// An integer constant or a variable reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Const(i64),
    Var(String),
}

impl Operand {
    pub fn var(id: impl Into<String>) -> Operand {
        Operand::Var(id.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Operand::Var(id) => Some(id),
            Operand::Const(_) => None,
        }
    }

    fn map_vars(&self, f: &dyn Fn(&str) -> String) -> Operand {
        match self {
            Operand::Const(c) => Operand::Const(*c),
            Operand::Var(id) => Operand::Var(f(id)),
        }
    }
}

impl From<i64> for Operand {
    fn from(v: i64) -> Self {
        Operand::Const(v)
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Const(c) => write!(f, "{c}"),
            Operand::Var(id) => f.write_str(id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Le,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Lt => "lt",
            Relation::Le => "le",
            Relation::Ge => "ge",
            Relation::Gt => "gt",
            Relation::Eq => "eq",
            Relation::Ne => "ne",
        }
    }

    pub fn from_name(s: &str) -> Option<Relation> {
        Some(match s {
            "lt" => Relation::Lt,
            "le" => Relation::Le,
            "ge" => Relation::Ge,
            "gt" => Relation::Gt,
            "eq" => Relation::Eq,
            "ne" => Relation::Ne,
            _ => return None,
        })
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Ge => a >= b,
            Relation::Gt => a > b,
            Relation::Eq => a == b,
            Relation::Ne => a != b,
        }
    }
}

/// Right-hand side comparison used by `sum`, `count` and `cumulative`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Cmp(Relation, Operand),
    /// Inclusive interval, `(in,lo..hi)`.
    In(i64, i64),
}

impl Condition {
    pub fn new(rel: Relation, rhs: impl Into<Operand>) -> Condition {
        Condition::Cmp(rel, rhs.into())
    }

    pub fn variable(&self) -> Option<&str> {
        match self {
            Condition::Cmp(_, op) => op.as_var(),
            Condition::In(..) => None,
        }
    }

    fn map_vars(&self, f: &dyn Fn(&str) -> String) -> Condition {
        match self {
            Condition::Cmp(r, op) => Condition::Cmp(*r, op.map_vars(f)),
            Condition::In(a, b) => Condition::In(*a, *b),
        }
    }
}

/// Ordering operator of `ordered` and `lex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl OrderOp {
    pub fn name(self) -> &'static str {
        match self {
            OrderOp::Lt => "lt",
            OrderOp::Le => "le",
            OrderOp::Gt => "gt",
            OrderOp::Ge => "ge",
        }
    }

    pub fn from_name(s: &str) -> Option<OrderOp> {
        Some(match s {
            "lt" => OrderOp::Lt,
            "le" => OrderOp::Le,
            "gt" => OrderOp::Gt,
            "ge" => OrderOp::Ge,
            _ => return None,
        })
    }

    pub fn is_strict(self) -> bool {
        matches!(self, OrderOp::Lt | OrderOp::Gt)
    }

    pub fn is_increasing(self) -> bool {
        matches!(self, OrderOp::Lt | OrderOp::Le)
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            OrderOp::Lt => a < b,
            OrderOp::Le => a <= b,
            OrderOp::Gt => a > b,
            OrderOp::Ge => a >= b,
        }
    }

    /// Lexicographic comparison of two equal-length sequences.
    pub fn holds_lex(self, a: &[i64], b: &[i64]) -> bool {
        let ord = a.cmp(b);
        match self {
            OrderOp::Lt => ord.is_lt(),
            OrderOp::Le => ord.is_le(),
            OrderOp::Gt => ord.is_gt(),
            OrderOp::Ge => ord.is_ge(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: String,
    pub symbol: i64,
    pub to: String,
}

/// Deterministic finite automaton over integer symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    pub start: String,
    pub transitions: Vec<Transition>,
    pub finals: Vec<String>,
}

impl Automaton {
    pub fn new(
        start: impl Into<String>,
        transitions: impl IntoIterator<Item = (String, i64, String)>,
        finals: impl IntoIterator<Item = String>,
    ) -> Automaton {
        let mut transitions: Vec<Transition> = transitions
            .into_iter()
            .map(|(from, symbol, to)| Transition { from, symbol, to })
            .collect();
        transitions.sort();
        transitions.dedup();
        let mut finals: Vec<String> = finals.into_iter().collect();
        finals.sort();
        finals.dedup();
        Automaton {
            start: start.into(),
            transitions,
            finals,
        }
    }

    pub fn next(&self, state: &str, symbol: i64) -> Option<&str> {
        self.transitions
            .iter()
            .find(|t| t.from == state && t.symbol == symbol)
            .map(|t| t.to.as_str())
    }

    pub fn accepts(&self, word: &[i64]) -> bool {
        let mut state = self.start.as_str();
        for &s in word {
            match self.next(state, s) {
                Some(q) => state = q,
                None => return false,
            }
        }
        self.finals.iter().any(|f| f == state)
    }

    /// All state names, sorted.
    pub fn states(&self) -> Vec<&str> {
        let mut states: Vec<&str> = std::iter::once(self.start.as_str())
            .chain(self.transitions.iter().flat_map(|t| [t.from.as_str(), t.to.as_str()]))
            .chain(self.finals.iter().map(String::as_str))
            .collect();
        states.sort_unstable();
        states.dedup();
        states
    }
}

/// Allowed number of occurrences of one value in `cardinality`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Occurs {
    Exact(i64),
    Between(i64, i64),
}

impl Occurs {
    pub fn bounds(self) -> (i64, i64) {
        match self {
            Occurs::Exact(k) => (k, k),
            Occurs::Between(a, b) => (a, b),
        }
    }
}

/// A template constraint applied to successive windows of a list. The
/// template refers to window positions through the placeholders `%0`,
/// `%1`, ...
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slide {
    pub list: Vec<String>,
    pub offset: usize,
    pub template: Box<Constraint>,
}

impl Slide {
    /// Number of placeholders used by the template (highest index + 1).
    pub fn window_arity(&self) -> usize {
        self.template
            .scope()
            .iter()
            .filter_map(|v| placeholder_index(v))
            .max()
            .map_or(0, |m| m + 1)
    }

    /// The concrete window constraints.
    pub fn windows(&self) -> Vec<Constraint> {
        let arity = self.window_arity();
        if self.offset == 0 || arity == 0 || arity > self.list.len() {
            return Vec::new();
        }
        (0..=(self.list.len() - arity))
            .step_by(self.offset)
            .map(|start| {
                self.template.map_vars(&|v| match placeholder_index(v) {
                    Some(i) => self.list[start + i].clone(),
                    None => v.to_string(),
                })
            })
            .collect()
    }
}

/// Parses `%i` placeholders.
pub fn placeholder_index(id: &str) -> Option<usize> {
    id.strip_prefix('%').and_then(|s| s.parse().ok())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    Intension(Expr),
    Extension {
        scope: Vec<String>,
        table: Arc<Table>,
    },
    Regular {
        scope: Vec<String>,
        automaton: Automaton,
    },
    AllDifferent(Vec<String>),
    AllDifferentMatrix(Vec<Vec<String>>),
    Ordered {
        scope: Vec<String>,
        op: OrderOp,
    },
    Lex {
        lists: Vec<Vec<String>>,
        op: OrderOp,
    },
    LexMatrix {
        matrix: Vec<Vec<String>>,
        op: OrderOp,
    },
    /// `sum(coeffs[i] * scope[i]) <condition>`; coefficients may be variables.
    Sum {
        scope: Vec<String>,
        coeffs: Vec<Operand>,
        condition: Condition,
    },
    Count {
        scope: Vec<String>,
        values: Vec<i64>,
        condition: Condition,
    },
    Cardinality {
        scope: Vec<String>,
        values: Vec<i64>,
        occurs: Vec<Occurs>,
        closed: bool,
    },
    /// `list[index] = value`, 0-based.
    Element {
        list: Vec<String>,
        index: String,
        value: Operand,
    },
    Channel {
        first: Vec<String>,
        second: Vec<String>,
    },
    NoOverlap {
        origins: Vec<(String, String)>,
        lengths: Vec<(Operand, Operand)>,
    },
    Cumulative {
        origins: Vec<String>,
        lengths: Vec<i64>,
        heights: Vec<i64>,
        limit: i64,
    },
    Circuit(Vec<String>),
    Instantiation {
        scope: Vec<String>,
        values: Vec<i64>,
    },
    Slide(Slide),
}

/// Constraint family names as they appear in XCSP3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    Intension,
    Extension,
    Regular,
    AllDifferent,
    AllDifferentMatrix,
    Ordered,
    Lex,
    LexMatrix,
    Sum,
    Count,
    Cardinality,
    Element,
    Channel,
    NoOverlap,
    Cumulative,
    Circuit,
    Instantiation,
    Slide,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 18] = [
        ConstraintKind::Intension,
        ConstraintKind::Extension,
        ConstraintKind::Regular,
        ConstraintKind::AllDifferent,
        ConstraintKind::AllDifferentMatrix,
        ConstraintKind::Ordered,
        ConstraintKind::Lex,
        ConstraintKind::LexMatrix,
        ConstraintKind::Sum,
        ConstraintKind::Count,
        ConstraintKind::Cardinality,
        ConstraintKind::Element,
        ConstraintKind::Channel,
        ConstraintKind::NoOverlap,
        ConstraintKind::Cumulative,
        ConstraintKind::Circuit,
        ConstraintKind::Instantiation,
        ConstraintKind::Slide,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::Intension => "intension",
            ConstraintKind::Extension => "extension",
            ConstraintKind::Regular => "regular",
            ConstraintKind::AllDifferent => "allDifferent",
            ConstraintKind::AllDifferentMatrix => "allDifferentMatrix",
            ConstraintKind::Ordered => "ordered",
            ConstraintKind::Lex => "lex",
            ConstraintKind::LexMatrix => "lexMatrix",
            ConstraintKind::Sum => "sum",
            ConstraintKind::Count => "count",
            ConstraintKind::Cardinality => "cardinality",
            ConstraintKind::Element => "element",
            ConstraintKind::Channel => "channel",
            ConstraintKind::NoOverlap => "noOverlap",
            ConstraintKind::Cumulative => "cumulative",
            ConstraintKind::Circuit => "circuit",
            ConstraintKind::Instantiation => "instantiation",
            ConstraintKind::Slide => "slide",
        }
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Constraint {
    pub fn kind(&self) -> ConstraintKind {
        match self {
            Constraint::Intension(_) => ConstraintKind::Intension,
            Constraint::Extension { .. } => ConstraintKind::Extension,
            Constraint::Regular { .. } => ConstraintKind::Regular,
            Constraint::AllDifferent(_) => ConstraintKind::AllDifferent,
            Constraint::AllDifferentMatrix(_) => ConstraintKind::AllDifferentMatrix,
            Constraint::Ordered { .. } => ConstraintKind::Ordered,
            Constraint::Lex { .. } => ConstraintKind::Lex,
            Constraint::LexMatrix { .. } => ConstraintKind::LexMatrix,
            Constraint::Sum { .. } => ConstraintKind::Sum,
            Constraint::Count { .. } => ConstraintKind::Count,
            Constraint::Cardinality { .. } => ConstraintKind::Cardinality,
            Constraint::Element { .. } => ConstraintKind::Element,
            Constraint::Channel { .. } => ConstraintKind::Channel,
            Constraint::NoOverlap { .. } => ConstraintKind::NoOverlap,
            Constraint::Cumulative { .. } => ConstraintKind::Cumulative,
            Constraint::Circuit(_) => ConstraintKind::Circuit,
            Constraint::Instantiation { .. } => ConstraintKind::Instantiation,
            Constraint::Slide(_) => ConstraintKind::Slide,
        }
    }

    /// Every variable reference in order of first appearance, without
    /// repetition. For `slide`, these are the list variables plus any
    /// non-placeholder variable in the template.
    pub fn scope(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.for_each_var(&mut |id| {
            if !out.contains(&id) {
                out.push(id)
            }
        });
        out
    }

    fn for_each_var<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        fn each<'a>(ids: &'a [String], f: &mut dyn FnMut(&'a str)) {
            ids.iter().for_each(|id| f(id));
        }
        fn operand<'a>(op: &'a Operand, f: &mut dyn FnMut(&'a str)) {
            if let Operand::Var(id) = op {
                f(id)
            }
        }
        match self {
            Constraint::Intension(e) => e.variables().into_iter().for_each(|v| f(v)),
            Constraint::Extension { scope, .. }
            | Constraint::Regular { scope, .. }
            | Constraint::AllDifferent(scope)
            | Constraint::Ordered { scope, .. }
            | Constraint::Circuit(scope)
            | Constraint::Instantiation { scope, .. }
            | Constraint::Cardinality { scope, .. } => each(scope, f),
            Constraint::AllDifferentMatrix(m)
            | Constraint::Lex { lists: m, .. }
            | Constraint::LexMatrix { matrix: m, .. } => m.iter().for_each(|r| each(r, f)),
            Constraint::Sum {
                scope,
                coeffs,
                condition,
            } => {
                each(scope, f);
                coeffs.iter().for_each(|c| operand(c, f));
                if let Some(v) = condition.variable() {
                    f(v)
                }
            }
            Constraint::Count {
                scope, condition, ..
            } => {
                each(scope, f);
                if let Some(v) = condition.variable() {
                    f(v)
                }
            }
            Constraint::Element { list, index, value } => {
                each(list, f);
                f(index);
                operand(value, f);
            }
            Constraint::Channel { first, second } => {
                each(first, f);
                each(second, f);
            }
            Constraint::NoOverlap { origins, lengths } => {
                for ((x, y), (w, h)) in origins.iter().zip(lengths) {
                    f(x);
                    f(y);
                    operand(w, f);
                    operand(h, f);
                }
                // unmatched tails (malformed) still reported
                for (x, y) in origins.iter().skip(lengths.len()) {
                    f(x);
                    f(y);
                }
                for (w, h) in lengths.iter().skip(origins.len()) {
                    operand(w, f);
                    operand(h, f);
                }
            }
            Constraint::Cumulative { origins, .. } => each(origins, f),
            Constraint::Slide(s) => {
                each(&s.list, f);
                s.template.for_each_var(&mut |id| {
                    if placeholder_index(id).is_none() {
                        f(id)
                    }
                });
            }
        }
    }

    /// Renames every variable reference.
    pub fn map_vars(&self, f: &dyn Fn(&str) -> String) -> Constraint {
        let list = |ids: &[String]| ids.iter().map(|id| f(id)).collect::<Vec<_>>();
        let matrix = |m: &[Vec<String>]| m.iter().map(|r| list(r)).collect::<Vec<_>>();
        match self {
            Constraint::Intension(e) => Constraint::Intension(e.map_vars(f)),
            Constraint::Extension { scope, table } => Constraint::Extension {
                scope: list(scope),
                table: Arc::clone(table),
            },
            Constraint::Regular { scope, automaton } => Constraint::Regular {
                scope: list(scope),
                automaton: automaton.clone(),
            },
            Constraint::AllDifferent(s) => Constraint::AllDifferent(list(s)),
            Constraint::AllDifferentMatrix(m) => Constraint::AllDifferentMatrix(matrix(m)),
            Constraint::Ordered { scope, op } => Constraint::Ordered {
                scope: list(scope),
                op: *op,
            },
            Constraint::Lex { lists, op } => Constraint::Lex {
                lists: matrix(lists),
                op: *op,
            },
            Constraint::LexMatrix { matrix: m, op } => Constraint::LexMatrix {
                matrix: matrix(m),
                op: *op,
            },
            Constraint::Sum {
                scope,
                coeffs,
                condition,
            } => Constraint::Sum {
                scope: list(scope),
                coeffs: coeffs.iter().map(|c| c.map_vars(f)).collect(),
                condition: condition.map_vars(f),
            },
            Constraint::Count {
                scope,
                values,
                condition,
            } => Constraint::Count {
                scope: list(scope),
                values: values.clone(),
                condition: condition.map_vars(f),
            },
            Constraint::Cardinality {
                scope,
                values,
                occurs,
                closed,
            } => Constraint::Cardinality {
                scope: list(scope),
                values: values.clone(),
                occurs: occurs.clone(),
                closed: *closed,
            },
            Constraint::Element { list: l, index, value } => Constraint::Element {
                list: list(l),
                index: f(index),
                value: value.map_vars(f),
            },
            Constraint::Channel { first, second } => Constraint::Channel {
                first: list(first),
                second: list(second),
            },
            Constraint::NoOverlap { origins, lengths } => Constraint::NoOverlap {
                origins: origins.iter().map(|(x, y)| (f(x), f(y))).collect(),
                lengths: lengths
                    .iter()
                    .map(|(w, h)| (w.map_vars(f), h.map_vars(f)))
                    .collect(),
            },
            Constraint::Cumulative {
                origins,
                lengths,
                heights,
                limit,
            } => Constraint::Cumulative {
                origins: list(origins),
                lengths: lengths.clone(),
                heights: heights.clone(),
                limit: *limit,
            },
            Constraint::Circuit(s) => Constraint::Circuit(list(s)),
            Constraint::Instantiation { scope, values } => Constraint::Instantiation {
                scope: list(scope),
                values: values.clone(),
            },
            Constraint::Slide(s) => Constraint::Slide(Slide {
                list: list(&s.list),
                offset: s.offset,
                template: Box::new(s.template.map_vars(&|id| {
                    if placeholder_index(id).is_some() {
                        id.to_string()
                    } else {
                        f(id)
                    }
                })),
            }),
        }
    }

    /// Kinds of the constraints this one stands for once `slide` windows
    /// are unfolded.
    pub fn effective_kinds(&self) -> Vec<ConstraintKind> {
        match self {
            Constraint::Slide(s) => s.template.effective_kinds(),
            c => vec![c.kind()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::table::Table;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn slide_windows_substitute_placeholders() {
        let tmpl = Constraint::Extension {
            scope: ids(&["%0", "%1", "%2"]),
            table: Arc::new(Table::conflicts(3, vec![vec![1, 1, 1]])),
        };
        let s = Slide {
            list: ids(&["a", "b", "c", "d"]),
            offset: 1,
            template: Box::new(tmpl),
        };
        let w = s.windows();
        assert_eq!(w.len(), 2);
        assert_eq!(w[1].scope(), vec!["b", "c", "d"]);
        assert_eq!(Constraint::Slide(s).scope(), vec!["a", "b", "c", "d"]);
    }

    #[test]
    fn scope_deduplicates() {
        let c = Constraint::Sum {
            scope: ids(&["x", "y"]),
            coeffs: vec![Operand::var("y"), Operand::Const(2)],
            condition: Condition::new(Relation::Eq, Operand::var("z")),
        };
        assert_eq!(c.scope(), vec!["x", "y", "z"]);
    }

    #[test]
    fn automaton_run() {
        let a = Automaton::new(
            "a",
            vec![
                ("a".to_string(), 0, "a".to_string()),
                ("a".to_string(), 1, "b".to_string()),
            ],
            vec!["b".to_string()],
        );
        assert!(a.accepts(&[0, 0, 1]));
        assert!(!a.accepts(&[1, 1]));
        assert_eq!(a.states(), vec!["a", "b"]);
    }
}
