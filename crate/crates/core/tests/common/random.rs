//! Random tiny instances over the whole constraint catalog, and a
//! generate-and-test enumerator used as the ground truth.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use xcsp_mini::model::{
    assignment_cost, constraint_satisfied, Automaton, Cell, Condition, Constraint,
    ConstraintKind, Domain, Expr, Instance, Objective, ObjectiveTarget, Occurs, Op, Operand,
    OrderOp, Polarity, Relation, Sense, Slide, Table, Valuation, Variable,
};

pub const KINDS: [ConstraintKind; 18] = [
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

const VALUES: std::ops::RangeInclusive<i64> = -1..=4;

pub fn random_domain(rng: &mut impl Rng, max_size: usize) -> Domain {
    let all: Vec<i64> = VALUES.collect();
    let size = rng.random_range(1..=max_size);
    Domain::new(all.choose_multiple(rng, size).copied())
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// `k` variables of `vars`, pairwise distinct with probability `distinct`.
fn pick(rng: &mut impl Rng, vars: &[String], k: usize, distinct: f64) -> Vec<String> {
    if rng.random_bool(distinct) && k <= vars.len() {
        vars.choose_multiple(rng, k).cloned().collect()
    } else {
        (0..k).map(|_| vars.choose(rng).unwrap().clone()).collect()
    }
}

fn pick_n<R: Rng>(
    rng: &mut R,
    vars: &[String],
    size: impl FnOnce(&mut R) -> usize,
    distinct: f64,
) -> Vec<String> {
    let k = size(rng);
    pick(rng, vars, k, distinct)
}

fn value(rng: &mut impl Rng) -> i64 {
    rng.random_range(VALUES)
}

fn relation(rng: &mut impl Rng) -> Relation {
    *[Relation::Lt, Relation::Le, Relation::Ge, Relation::Gt, Relation::Eq, Relation::Ne]
        .choose(rng)
        .unwrap()
}

fn order_op(rng: &mut impl Rng) -> OrderOp {
    *[OrderOp::Lt, OrderOp::Le, OrderOp::Gt, OrderOp::Ge].choose(rng).unwrap()
}

fn operand(rng: &mut impl Rng, vars: &[String]) -> Operand {
    if rng.random_bool(0.5) {
        Operand::Const(rng.random_range(-2..=3))
    } else {
        Operand::var(vars.choose(rng).unwrap())
    }
}

fn condition(rng: &mut impl Rng, vars: &[String], scale: i64) -> Condition {
    if rng.random_bool(0.2) {
        let lo = rng.random_range(-scale..=scale);
        Condition::In(lo, lo + rng.random_range(0..=scale))
    } else if rng.random_bool(0.7) {
        Condition::Cmp(relation(rng), Operand::Const(rng.random_range(-scale..=scale)))
    } else {
        Condition::Cmp(relation(rng), Operand::var(vars.choose(rng).unwrap()))
    }
}

fn arith(rng: &mut impl Rng, vars: &[String], depth: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.4) {
        return if rng.random_bool(0.75) {
            Expr::Var(vars.choose(rng).unwrap().clone())
        } else {
            Expr::Const(rng.random_range(-2..=3))
        };
    }
    let op = *[Op::Neg, Op::Abs, Op::Add, Op::Sub, Op::Mul, Op::Dist].choose(rng).unwrap();
    let n = match op {
        Op::Neg | Op::Abs => 1,
        Op::Add | Op::Mul => rng.random_range(2..=3),
        _ => 2,
    };
    Expr::Op(op, (0..n).map(|_| arith(rng, vars, depth - 1)).collect())
}

pub fn predicate(rng: &mut impl Rng, vars: &[String], depth: usize) -> Expr {
    if depth <= 1 || rng.random_bool(0.5) {
        let op = *[Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge].choose(rng).unwrap();
        return Expr::Op(op, vec![arith(rng, vars, 2), arith(rng, vars, 2)]);
    }
    let op = *[Op::Not, Op::And, Op::Or, Op::Xor, Op::Iff, Op::Imp].choose(rng).unwrap();
    let n = match op {
        Op::Not => 1,
        Op::And | Op::Or => rng.random_range(2..=3),
        _ => 2,
    };
    Expr::Op(op, (0..n).map(|_| predicate(rng, vars, depth - 1)).collect())
}

fn table(rng: &mut impl Rng, arity: usize) -> Table {
    let rows = rng.random_range(0..=8);
    let polarity = if rng.random_bool(0.5) {
        Polarity::Supports
    } else {
        Polarity::Conflicts
    };
    let star = rng.random_bool(0.3);
    Table::new(
        arity,
        polarity,
        (0..rows).map(|_| {
            (0..arity)
                .map(|_| {
                    if star && rng.random_bool(0.2) {
                        Cell::Star
                    } else {
                        Cell::Value(value(rng))
                    }
                })
                .collect()
        }),
    )
    .unwrap()
}

fn automaton(rng: &mut impl Rng) -> Automaton {
    let states = ["a", "b", "c"];
    let n = rng.random_range(1..=3);
    let mut transitions = Vec::new();
    for q in &states[..n] {
        for sym in VALUES {
            if rng.random_bool(0.5) {
                let to = states[rng.random_range(0..n)];
                transitions.push((q.to_string(), sym, to.to_string()));
            }
        }
    }
    let mut reached = BTreeSet::from(["a".to_string()]);
    loop {
        let more: Vec<String> = transitions
            .iter()
            .filter(|t| reached.contains(&t.0))
            .map(|t| t.2.clone())
            .filter(|q| !reached.contains(q))
            .collect();
        if more.is_empty() {
            break;
        }
        reached.extend(more);
    }
    let reached: Vec<String> = reached.into_iter().collect();
    let finals: Vec<String> = reached
        .iter()
        .filter(|_| rng.random_bool(0.6))
        .cloned()
        .collect();
    Automaton::new("a", transitions, finals)
}

fn matrix(rng: &mut impl Rng, vars: &[String], rows: usize, cols: usize) -> Vec<Vec<String>> {
    let flat = pick(rng, vars, rows * cols, 0.8);
    flat.chunks(cols).map(|c| c.to_vec()).collect()
}

/// A random constraint of the given kind over `vars`, scope at most
/// `max_scope` where the kind allows it.
pub fn random_constraint(
    rng: &mut impl Rng,
    kind: ConstraintKind,
    vars: &[String],
    max_scope: usize,
) -> Constraint {
    let k = |rng: &mut dyn rand::RngCore, lo: usize| rng.random_range(lo..=max_scope.max(lo));
    match kind {
        ConstraintKind::Intension => {
            let arity = k(rng, 1);
            let scope = pick(rng, vars, arity, 1.0);
            Constraint::Intension(predicate(rng, &scope, 3))
        }
        ConstraintKind::Extension => {
            let arity = k(rng, 1).min(3);
            Constraint::Extension {
                scope: pick(rng, vars, arity, 0.8),
                table: Arc::new(table(rng, arity)),
            }
        }
        ConstraintKind::Regular => Constraint::Regular {
            scope: pick_n(rng, vars, |r| k(r, 1), 0.0),
            automaton: automaton(rng),
        },
        ConstraintKind::AllDifferent => {
            Constraint::AllDifferent(pick_n(rng, vars, |r| k(r, 2), 0.9))
        }
        ConstraintKind::AllDifferentMatrix => {
            Constraint::AllDifferentMatrix(matrix(rng, vars, 2, 2))
        }
        ConstraintKind::Ordered => Constraint::Ordered {
            scope: pick_n(rng, vars, |r| k(r, 2), 0.8),
            op: order_op(rng),
        },
        ConstraintKind::Lex => {
            let lists = if max_scope >= 6 && rng.random_bool(0.3) { 3 } else { 2 };
            let len = (max_scope / lists).clamp(1, 2);
            Constraint::Lex {
                lists: {
                    let cols = rng.random_range(1..=len);
                    matrix(rng, vars, lists, cols)
                },
                op: order_op(rng),
            }
        }
        ConstraintKind::LexMatrix => Constraint::LexMatrix {
            matrix: matrix(rng, vars, 2, 2),
            op: order_op(rng),
        },
        ConstraintKind::Sum => {
            let n = k(rng, 1).min(3);
            let scope = pick(rng, vars, n, 0.8);
            let coeffs = scope
                .iter()
                .map(|_| {
                    if rng.random_bool(0.8) {
                        Operand::Const(rng.random_range(-2..=2))
                    } else {
                        Operand::var(vars.choose(rng).unwrap())
                    }
                })
                .collect();
            Constraint::Sum {
                scope,
                coeffs,
                condition: condition(rng, vars, 4),
            }
        }
        ConstraintKind::Count => {
            let n = k(rng, 1);
            let targets: Vec<i64> = (0..rng.random_range(1..=2)).map(|_| value(rng)).collect();
            Constraint::Count {
                scope: pick(rng, vars, n, 0.8),
                values: targets.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
                condition: condition(rng, vars, 2),
            }
        }
        ConstraintKind::Cardinality => {
            let values: Vec<i64> = (0..rng.random_range(1..=2))
                .map(|_| value(rng))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let occurs = values
                .iter()
                .map(|_| {
                    let a = rng.random_range(0..=2);
                    if rng.random_bool(0.5) {
                        Occurs::Exact(a)
                    } else {
                        Occurs::Between(a, a + rng.random_range(0..=2))
                    }
                })
                .collect();
            Constraint::Cardinality {
                scope: pick_n(rng, vars, |r| k(r, 1), 1.0),
                values,
                occurs,
                closed: rng.random_bool(0.3),
            }
        }
        ConstraintKind::Element => {
            let n = k(rng, 2).saturating_sub(1).clamp(1, 3);
            let list = pick(rng, vars, n, 0.7);
            Constraint::Element {
                list,
                index: vars.choose(rng).unwrap().clone(),
                value: operand(rng, vars),
            }
        }
        ConstraintKind::Channel => {
            let total = k(rng, 2).min(4);
            let first = rng.random_range(1..=total / 2);
            let chosen = pick(rng, vars, total, 0.9);
            let (a, b) = chosen.split_at(first);
            Constraint::Channel {
                first: a.to_vec(),
                second: b.to_vec(),
            }
        }
        ConstraintKind::NoOverlap => {
            let boxes = (max_scope / 2).clamp(1, 2);
            let origins = (0..boxes)
                .map(|_| {
                    let p = pick(rng, vars, 2, 1.0);
                    (p[0].clone(), p[1].clone())
                })
                .collect();
            let lengths = (0..boxes)
                .map(|_| {
                    let mut len = || {
                        if rng.random_bool(0.7) {
                            Operand::Const(rng.random_range(0..=2))
                        } else {
                            Operand::var(vars.choose(rng).unwrap())
                        }
                    };
                    (len(), len())
                })
                .collect();
            Constraint::NoOverlap { origins, lengths }
        }
        ConstraintKind::Cumulative => {
            let n = k(rng, 1).min(3);
            Constraint::Cumulative {
                origins: pick(rng, vars, n, 0.8),
                lengths: (0..n).map(|_| rng.random_range(0..=2)).collect(),
                heights: (0..n).map(|_| rng.random_range(0..=2)).collect(),
                limit: rng.random_range(0..=3),
            }
        }
        ConstraintKind::Circuit => {
            Constraint::Circuit(pick_n(rng, vars, |r| k(r, 2), 0.9))
        }
        ConstraintKind::Instantiation => {
            let n = k(rng, 1).min(2);
            Constraint::Instantiation {
                scope: pick(rng, vars, n, 1.0),
                values: (0..n).map(|_| value(rng)).collect(),
            }
        }
        ConstraintKind::Slide => {
            let len = k(rng, 2).max(2);
            let list = pick(rng, vars, len, 0.8);
            let window = ["%0".to_string(), "%1".to_string()];
            let template = match rng.random_range(0..3) {
                0 => loop {
                    let e = predicate(rng, &window, 2);
                    if !e.variables().is_empty() {
                        break Constraint::Intension(e);
                    }
                },
                1 => Constraint::Extension {
                    scope: window.to_vec(),
                    table: Arc::new(table(rng, 2)),
                },
                _ => Constraint::Sum {
                    scope: window.to_vec(),
                    coeffs: vec![Operand::Const(1), Operand::Const(rng.random_range(-1..=1))],
                    condition: Condition::Cmp(relation(rng), Operand::Const(rng.random_range(-1..=4))),
                },
            };
            Constraint::Slide(Slide {
                list,
                offset: rng.random_range(1..=2),
                template: Box::new(template),
            })
        }
    }
}

pub fn random_objective(rng: &mut impl Rng, vars: &[String]) -> Objective {
    let sense = if rng.random_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let target = match rng.random_range(0..3) {
        0 => ObjectiveTarget::Variable(vars.choose(rng).unwrap().clone()),
        1 => {
            let scope = pick_n(rng, vars, |r| r.random_range(1..=3), 0.0);
            let coeffs = scope.iter().map(|_| rng.random_range(-3..=3)).collect();
            ObjectiveTarget::Sum { scope, coeffs }
        }
        _ => ObjectiveTarget::Maximum(pick_n(rng, vars, |r| r.random_range(1..=3), 0.0)),
    };
    Objective { sense, target }
}

/// A CSP with `1..=max_vars` variables and `1..=6` constraints of random
/// kinds. `kind` forces one constraint of that kind.
pub fn random_instance(rng: &mut impl Rng, max_vars: usize, max_dom: usize, kind: Option<ConstraintKind>) -> Instance {
    let n = rng.random_range(2..=max_vars);
    let vars = names(n);
    let variables = vars
        .iter()
        .map(|v| Variable::new(v.clone(), random_domain(rng, max_dom)))
        .collect();
    let m = rng.random_range(1..=6);
    let constraints = (0..m)
        .map(|i| {
            let kind = match (i, kind) {
                (0, Some(k)) => k,
                _ => *KINDS.choose(rng).unwrap(),
            };
            random_constraint(rng, kind, &vars, 4)
        })
        .collect();
    Instance::new(variables, constraints)
}

struct Dense<'a> {
    index: &'a HashMap<&'a str, usize>,
    values: &'a [i64],
}

impl Valuation for Dense<'_> {
    fn value_of(&self, id: &str) -> Option<i64> {
        self.index.get(id).map(|&i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truth {
    pub count: u64,
    /// Best objective value over all solutions, when the instance has one.
    pub optimum: Option<i64>,
}

/// Generate-and-test over the full domain product.
pub fn brute_force(instance: &Instance) -> Truth {
    let index = instance.index_map();
    let domains: Vec<&[i64]> = instance.variables.iter().map(|v| v.domain.values()).collect();
    let mut truth = Truth {
        count: 0,
        optimum: None,
    };
    if domains.iter().any(|d| d.is_empty()) {
        return truth;
    }
    let mut digits = vec![0usize; domains.len()];
    let mut values: Vec<i64> = domains.iter().map(|d| d[0]).collect();
    loop {
        let v = Dense {
            index: &index,
            values: &values,
        };
        if instance
            .constraints
            .iter()
            .all(|c| constraint_satisfied(c, &v).unwrap_or(false))
        {
            truth.count += 1;
            if let Some(obj) = &instance.objective {
                let cost = assignment_cost(instance, &v).unwrap();
                if truth.optimum.is_none_or(|b| obj.sense.improves(cost, b)) {
                    truth.optimum = Some(cost);
                }
            }
        }
        let mut p = digits.len();
        loop {
            if p == 0 {
                return truth;
            }
            p -= 1;
            digits[p] += 1;
            if digits[p] < domains[p].len() {
                values[p] = domains[p][digits[p]];
                break;
            }
            digits[p] = 0;
            values[p] = domains[p][0];
        }
    }
}

/// Exhaustive check that `value` of `var` extends to a tuple of `domains`
/// satisfying `c`. Only the scope of `c` is enumerated.
pub fn supported(
    c: &Constraint,
    domains: &HashMap<String, Vec<i64>>,
    var: &str,
    value: i64,
) -> bool {
    let mut scope: Vec<&str> = c.scope();
    scope.sort_unstable();
    scope.dedup();
    let lists: Vec<Vec<i64>> = scope
        .iter()
        .map(|v| if *v == var { vec![value] } else { domains[*v].clone() })
        .collect();
    any_tuple(&scope, &lists, |a| constraint_satisfied(c, a).unwrap_or(false))
}

/// Some tuple of `lists` (over `scope`) satisfies `ok`.
pub fn any_tuple(
    scope: &[&str],
    lists: &[Vec<i64>],
    mut ok: impl FnMut(&HashMap<String, i64>) -> bool,
) -> bool {
    if lists.iter().any(|l| l.is_empty()) {
        return false;
    }
    let mut digits = vec![0usize; lists.len()];
    let mut a: HashMap<String, i64> = scope
        .iter()
        .zip(lists)
        .map(|(v, l)| (v.to_string(), l[0]))
        .collect();
    loop {
        if ok(&a) {
            return true;
        }
        let mut p = digits.len();
        loop {
            if p == 0 {
                return false;
            }
            p -= 1;
            digits[p] += 1;
            if digits[p] < lists[p].len() {
                a.insert(scope[p].to_string(), lists[p][digits[p]]);
                break;
            }
            digits[p] = 0;
            a.insert(scope[p].to_string(), lists[p][0]);
        }
    }
}
