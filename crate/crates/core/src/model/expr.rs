use std::fmt;

use thiserror::Error;

use super::Valuation;

/// Operators allowed in intension predicates, named as in the functional
/// XCSP3 syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Neg,
    Abs,
    Add,
    Sub,
    Mul,
    Dist,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Not,
    And,
    Or,
    Xor,
    Iff,
    Imp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::AtLeast(k) => n >= k,
        }
    }
}

impl Op {
    pub const ALL: [Op; 18] = [
        Op::Neg,
        Op::Abs,
        Op::Add,
        Op::Sub,
        Op::Mul,
        Op::Dist,
        Op::Eq,
        Op::Ne,
        Op::Lt,
        Op::Le,
        Op::Gt,
        Op::Ge,
        Op::Not,
        Op::And,
        Op::Or,
        Op::Xor,
        Op::Iff,
        Op::Imp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::Neg => "neg",
            Op::Abs => "abs",
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Dist => "dist",
            Op::Eq => "eq",
            Op::Ne => "ne",
            Op::Lt => "lt",
            Op::Le => "le",
            Op::Gt => "gt",
            Op::Ge => "ge",
            Op::Not => "not",
            Op::And => "and",
            Op::Or => "or",
            Op::Xor => "xor",
            Op::Iff => "iff",
            Op::Imp => "imp",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.iter().copied().find(|op| op.name() == name)
    }

    pub fn arity(self) -> Arity {
        match self {
            Op::Neg | Op::Abs | Op::Not => Arity::Exactly(1),
            Op::Add | Op::Mul | Op::And | Op::Or => Arity::AtLeast(2),
            _ => Arity::Exactly(2),
        }
    }

    /// True for operators whose result is a truth value (0/1).
    pub fn is_boolean(self) -> bool {
        !matches!(
            self,
            Op::Neg | Op::Abs | Op::Add | Op::Sub | Op::Mul | Op::Dist
        )
    }

    /// True for operators whose operands are read as truth values.
    pub fn is_logical(self) -> bool {
        matches!(
            self,
            Op::Not | Op::And | Op::Or | Op::Xor | Op::Iff | Op::Imp
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(String),
    Op(Op, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("operator `{op}` applied to {found} operands")]
    ArityMismatch { op: &'static str, found: usize },
    #[error("arithmetic overflow while evaluating `{0}`")]
    Overflow(&'static str),
}

impl Expr {
    pub fn var(id: impl Into<String>) -> Expr {
        Expr::Var(id.into())
    }

    pub fn op(op: Op, children: Vec<Expr>) -> Expr {
        Expr::Op(op, children)
    }

    /// Variables in order of first occurrence, without repetition.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(id) => {
                if !out.contains(&id.as_str()) {
                    out.push(id);
                }
            }
            Expr::Op(_, children) => children.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self, Expr::Op(op, _) if op.is_boolean())
    }

    /// Renames every variable reference.
    pub fn map_vars(&self, f: &dyn Fn(&str) -> String) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(id) => Expr::Var(f(id)),
            Expr::Op(op, children) => {
                Expr::Op(*op, children.iter().map(|c| c.map_vars(f)).collect())
            }
        }
    }

    /// First node whose operand count does not fit its operator.
    pub fn arity_violation(&self) -> Option<(Op, usize)> {
        match self {
            Expr::Op(op, children) => {
                if !op.arity().accepts(children.len()) {
                    return Some((*op, children.len()));
                }
                children.iter().find_map(|c| c.arity_violation())
            }
            _ => None,
        }
    }

    /// Integer value of the expression; truth values are 1 and 0, and
    /// logical operators read any non-zero operand as true.
    pub fn evaluate(&self, valuation: &(impl Valuation + ?Sized)) -> Result<i64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(id) => valuation
                .value_of(id)
                .ok_or_else(|| EvalError::UnboundVariable(id.clone())),
            Expr::Op(op, children) => {
                if !op.arity().accepts(children.len()) {
                    return Err(EvalError::ArityMismatch {
                        op: op.name(),
                        found: children.len(),
                    });
                }
                let vals = children
                    .iter()
                    .map(|c| c.evaluate(valuation))
                    .collect::<Result<Vec<_>, _>>()?;
                apply(*op, &vals)
            }
        }
    }
}

/// Applies `op` to already evaluated operands. Operand counts are assumed
/// valid.
pub fn apply(op: Op, vals: &[i64]) -> Result<i64, EvalError> {
    let overflow = || EvalError::Overflow(op.name());
    let truth = |v: i64| v != 0;
    let b = |t: bool| t as i64;
    Ok(match op {
        Op::Neg => vals[0].checked_neg().ok_or_else(overflow)?,
        Op::Abs => vals[0].checked_abs().ok_or_else(overflow)?,
        Op::Add => vals
            .iter()
            .try_fold(0i64, |acc, &v| acc.checked_add(v))
            .ok_or_else(overflow)?,
        Op::Mul => vals
            .iter()
            .try_fold(1i64, |acc, &v| acc.checked_mul(v))
            .ok_or_else(overflow)?,
        Op::Sub => vals[0].checked_sub(vals[1]).ok_or_else(overflow)?,
        Op::Dist => vals[0]
            .checked_sub(vals[1])
            .and_then(i64::checked_abs)
            .ok_or_else(overflow)?,
        Op::Eq => b(vals[0] == vals[1]),
        Op::Ne => b(vals[0] != vals[1]),
        Op::Lt => b(vals[0] < vals[1]),
        Op::Le => b(vals[0] <= vals[1]),
        Op::Gt => b(vals[0] > vals[1]),
        Op::Ge => b(vals[0] >= vals[1]),
        Op::Not => b(!truth(vals[0])),
        Op::And => b(vals.iter().all(|&v| truth(v))),
        Op::Or => b(vals.iter().any(|&v| truth(v))),
        Op::Xor => b(truth(vals[0]) != truth(vals[1])),
        Op::Iff => b(truth(vals[0]) == truth(vals[1])),
        Op::Imp => b(!truth(vals[0]) || truth(vals[1])),
    })
}

impl fmt::Display for Expr {
    /// Functional prefix form, e.g. `eq(add(x,y),z)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(id) => f.write_str(id),
            Expr::Op(op, children) => {
                write!(f, "{}(", op.name())?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Short constructors for building predicates by hand.
pub mod dsl {
    use super::{Expr, Op};

    pub fn int(v: i64) -> Expr {
        Expr::Const(v)
    }
    pub fn var(id: impl Into<String>) -> Expr {
        Expr::Var(id.into())
    }
    fn bin(op: Op, a: Expr, b: Expr) -> Expr {
        Expr::Op(op, vec![a, b])
    }
    pub fn neg(a: Expr) -> Expr {
        Expr::Op(Op::Neg, vec![a])
    }
    pub fn abs(a: Expr) -> Expr {
        Expr::Op(Op::Abs, vec![a])
    }
    pub fn not(a: Expr) -> Expr {
        Expr::Op(Op::Not, vec![a])
    }
    pub fn add(a: Expr, b: Expr) -> Expr {
        bin(Op::Add, a, b)
    }
    pub fn sub(a: Expr, b: Expr) -> Expr {
        bin(Op::Sub, a, b)
    }
    pub fn mul(a: Expr, b: Expr) -> Expr {
        bin(Op::Mul, a, b)
    }
    pub fn dist(a: Expr, b: Expr) -> Expr {
        bin(Op::Dist, a, b)
    }
    pub fn eq(a: Expr, b: Expr) -> Expr {
        bin(Op::Eq, a, b)
    }
    pub fn ne(a: Expr, b: Expr) -> Expr {
        bin(Op::Ne, a, b)
    }
    pub fn lt(a: Expr, b: Expr) -> Expr {
        bin(Op::Lt, a, b)
    }
    pub fn le(a: Expr, b: Expr) -> Expr {
        bin(Op::Le, a, b)
    }
    pub fn gt(a: Expr, b: Expr) -> Expr {
        bin(Op::Gt, a, b)
    }
    pub fn ge(a: Expr, b: Expr) -> Expr {
        bin(Op::Ge, a, b)
    }
    pub fn and(a: Expr, b: Expr) -> Expr {
        bin(Op::And, a, b)
    }
    pub fn or(a: Expr, b: Expr) -> Expr {
        bin(Op::Or, a, b)
    }
    pub fn xor(a: Expr, b: Expr) -> Expr {
        bin(Op::Xor, a, b)
    }
    pub fn iff(a: Expr, b: Expr) -> Expr {
        bin(Op::Iff, a, b)
    }
    pub fn imp(a: Expr, b: Expr) -> Expr {
        bin(Op::Imp, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::dsl::*;
    use super::*;
    use crate::model::Assignment;

    fn asg(pairs: &[(&str, i64)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn dist_of_constants() {
        assert_eq!(dist(int(3), int(7)).evaluate(&Assignment::new()), Ok(4));
    }

    #[test]
    fn sum_equality() {
        let e = eq(add(var("x"), var("y")), var("z"));
        assert_eq!(e.evaluate(&asg(&[("x", 1), ("y", 2), ("z", 3)])), Ok(1));
    }

    #[test]
    fn false_antecedent() {
        let e = imp(eq(var("x"), int(0)), ne(var("y"), int(0)));
        assert_eq!(e.evaluate(&asg(&[("x", 1), ("y", 0)])), Ok(1));
    }

    #[test]
    fn booleans_coerce_in_arithmetic() {
        let e = add(eq(var("x"), int(1)), eq(var("y"), int(1)));
        assert_eq!(e.evaluate(&asg(&[("x", 1), ("y", 1)])), Ok(2));
    }

    #[test]
    fn unbound_and_arity_errors() {
        assert_eq!(
            var("q").evaluate(&Assignment::new()),
            Err(EvalError::UnboundVariable("q".into()))
        );
        let bad = Expr::Op(Op::Sub, vec![int(1)]);
        assert!(matches!(
            bad.evaluate(&Assignment::new()),
            Err(EvalError::ArityMismatch { op: "sub", found: 1 })
        ));
    }

    #[test]
    fn prefix_display() {
        let e = eq(var("x[1]"), add(int(-2), var("y")));
        assert_eq!(e.to_string(), "eq(x[1],add(-2,y))");
    }
}
