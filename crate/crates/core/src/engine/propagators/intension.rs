use super::table::{CompactTable, Row};
use super::{div_ceil, div_floor, fail, Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};
use crate::model::{apply, Expr, Op};

/// Predicates over at most this many distinct variables are tabulated.
const TABULATE_ARITY: usize = 3;
/// ... provided the initial domain product stays below this.
const TABULATE_PRODUCT: u128 = 1 << 16;

const INF: i128 = 1 << 100;

#[derive(Debug, Clone)]
enum Node {
    Const(i64),
    /// Position in `ExprProg::vars`.
    Var(usize),
    Op(Op, Vec<usize>),
}

/// A predicate flattened into post order; the root is the last node.
#[derive(Debug, Clone)]
pub(crate) struct ExprProg {
    nodes: Vec<Node>,
    vars: Vec<VarId>,
}

impl ExprProg {
    pub fn compile(e: &Expr, var: &dyn Fn(&str) -> VarId) -> ExprProg {
        let mut prog = ExprProg {
            nodes: Vec::new(),
            vars: Vec::new(),
        };
        prog.push(e, var);
        prog
    }

    fn push(&mut self, e: &Expr, var: &dyn Fn(&str) -> VarId) -> usize {
        let node = match e {
            Expr::Const(c) => Node::Const(*c),
            Expr::Var(id) => {
                let v = var(id);
                let p = match self.vars.iter().position(|&x| x == v) {
                    Some(p) => p,
                    None => {
                        self.vars.push(v);
                        self.vars.len() - 1
                    }
                };
                Node::Var(p)
            }
            Expr::Op(op, children) => {
                let ch = children.iter().map(|c| self.push(c, var)).collect();
                Node::Op(*op, ch)
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Truth of the predicate with `vals[p]` bound to `vars[p]`. Overflow
    /// counts as false.
    pub fn holds(&self, vals: &[i64], scratch: &mut Vec<i64>) -> bool {
        scratch.clear();
        let mut args = Vec::new();
        for node in &self.nodes {
            let v = match node {
                Node::Const(c) => *c,
                Node::Var(p) => vals[*p],
                Node::Op(op, ch) => {
                    args.clear();
                    args.extend(ch.iter().map(|&c| scratch[c]));
                    match apply(*op, &args) {
                        Ok(v) => v,
                        Err(_) => return false,
                    }
                }
            };
            scratch.push(v);
        }
        scratch[self.root()] != 0
    }
}

pub(crate) fn build(prog: ExprProg, s: &mut DomainStore) -> Box<dyn Propagator> {
    let product = prog
        .vars
        .iter()
        .map(|&v| s.initial(v).len() as u128)
        .try_fold(1u128, |acc, n| acc.checked_mul(n))
        .unwrap_or(u128::MAX);
    let mut scratch = Vec::new();
    if prog.vars.is_empty() {
        return if prog.holds(&[], &mut scratch) {
            Box::new(Hc4::new(prog))
        } else {
            fail()
        };
    }
    if prog.vars.len() > TABULATE_ARITY || product > TABULATE_PRODUCT {
        return Box::new(Hc4::new(prog));
    }
    let domains: Vec<Vec<i64>> = prog.vars.iter().map(|&v| s.initial(v).to_vec()).collect();
    let mut rows: Vec<Row> = Vec::new();
    let mut digits = vec![0usize; domains.len()];
    let mut vals: Vec<i64> = domains.iter().map(|d| d[0]).collect();
    'outer: loop {
        if prog.holds(&vals, &mut scratch) {
            rows.push(digits.iter().map(|&k| Some(k)).collect());
        }
        let mut p = digits.len();
        loop {
            if p == 0 {
                break 'outer;
            }
            p -= 1;
            digits[p] += 1;
            if digits[p] < domains[p].len() {
                vals[p] = domains[p][digits[p]];
                break;
            }
            digits[p] = 0;
            vals[p] = domains[p][0];
        }
    }
    Box::new(CompactTable::new(prog.vars, rows, s))
}

/// Interval narrowing over the expression tree (HC4-revise), plus a
/// support scan once a single variable remains unfixed.
pub(crate) struct Hc4 {
    prog: ExprProg,
    lo: Vec<i128>,
    hi: Vec<i128>,
    vals: Vec<i64>,
    scratch: Vec<i64>,
}

fn truth(lo: i128, hi: i128) -> Option<bool> {
    if lo > 0 || hi < 0 {
        Some(true)
    } else if lo == 0 && hi == 0 {
        Some(false)
    } else {
        None
    }
}

fn bool_interval(t: Option<bool>) -> (i128, i128) {
    match t {
        Some(true) => (1, 1),
        Some(false) => (0, 0),
        None => (0, 1),
    }
}

fn mul_interval(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    let c = [
        a.0.saturating_mul(b.0),
        a.0.saturating_mul(b.1),
        a.1.saturating_mul(b.0),
        a.1.saturating_mul(b.1),
    ];
    let lo = *c.iter().min().unwrap();
    let hi = *c.iter().max().unwrap();
    (lo.clamp(-INF, INF), hi.clamp(-INF, INF))
}

fn abs_interval(lo: i128, hi: i128) -> (i128, i128) {
    if lo >= 0 {
        (lo, hi)
    } else if hi <= 0 {
        (-hi, -lo)
    } else {
        (0, hi.max(-lo))
    }
}

/// Values of `d` with `|d|` in `[l, u]`, as an interval hull over `d`'s
/// current interval.
fn abs_inverse(dlo: i128, dhi: i128, l: i128, u: i128) -> (i128, i128) {
    let l = l.max(0);
    if dlo >= 0 {
        (dlo.max(l), dhi.min(u))
    } else if dhi <= 0 {
        (dlo.max(-u), dhi.min(-l))
    } else {
        let (mut lo, mut hi) = (dlo.max(-u), dhi.min(u));
        if l > 0 {
            if -l < lo {
                lo = lo.max(l);
            }
            if l > hi {
                hi = hi.min(-l);
            }
        }
        (lo, hi)
    }
}

impl Hc4 {
    fn new(prog: ExprProg) -> Hc4 {
        let n = prog.nodes.len();
        Hc4 {
            vals: vec![0; prog.vars.len()],
            prog,
            lo: vec![0; n],
            hi: vec![0; n],
            scratch: Vec::new(),
        }
    }

    fn forward(&mut self, s: &DomainStore) {
        for i in 0..self.prog.nodes.len() {
            let (lo, hi) = match &self.prog.nodes[i] {
                Node::Const(c) => (*c as i128, *c as i128),
                Node::Var(p) => {
                    let v = self.prog.vars[*p];
                    (s.min(v) as i128, s.max(v) as i128)
                }
                Node::Op(op, ch) => self.forward_op(*op, ch),
            };
            self.lo[i] = lo;
            self.hi[i] = hi;
        }
    }

    fn iv(&self, n: usize) -> (i128, i128) {
        (self.lo[n], self.hi[n])
    }

    fn t(&self, n: usize) -> Option<bool> {
        truth(self.lo[n], self.hi[n])
    }

    fn forward_op(&self, op: Op, ch: &[usize]) -> (i128, i128) {
        let a = self.iv(ch[0]);
        let b = ch.get(1).map(|&c| self.iv(c)).unwrap_or((0, 0));
        let cmp = |sure: bool, never: bool| bool_interval(if sure { Some(true) } else if never { Some(false) } else { None });
        match op {
            Op::Neg => (-a.1, -a.0),
            Op::Abs => abs_interval(a.0, a.1),
            Op::Add => ch.iter().fold((0, 0), |acc, &c| {
                (
                    acc.0.saturating_add(self.lo[c]).max(-INF),
                    acc.1.saturating_add(self.hi[c]).min(INF),
                )
            }),
            Op::Sub => (a.0 - b.1, a.1 - b.0),
            Op::Mul => ch[1..]
                .iter()
                .fold(a, |acc, &c| mul_interval(acc, self.iv(c))),
            Op::Dist => abs_interval(a.0 - b.1, a.1 - b.0),
            Op::Eq => cmp(a.0 == a.1 && b.0 == b.1 && a.0 == b.0, a.1 < b.0 || b.1 < a.0),
            Op::Ne => cmp(a.1 < b.0 || b.1 < a.0, a.0 == a.1 && b.0 == b.1 && a.0 == b.0),
            Op::Lt => cmp(a.1 < b.0, a.0 >= b.1),
            Op::Le => cmp(a.1 <= b.0, a.0 > b.1),
            Op::Gt => cmp(a.0 > b.1, a.1 <= b.0),
            Op::Ge => cmp(a.0 >= b.1, a.1 < b.0),
            Op::Not => bool_interval(truth(a.0, a.1).map(|t| !t)),
            Op::And => {
                let ts: Vec<Option<bool>> = ch.iter().map(|&c| self.t(c)).collect();
                bool_interval(if ts.contains(&Some(false)) {
                    Some(false)
                } else if ts.iter().all(|t| *t == Some(true)) {
                    Some(true)
                } else {
                    None
                })
            }
            Op::Or => {
                let ts: Vec<Option<bool>> = ch.iter().map(|&c| self.t(c)).collect();
                bool_interval(if ts.contains(&Some(true)) {
                    Some(true)
                } else if ts.iter().all(|t| *t == Some(false)) {
                    Some(false)
                } else {
                    None
                })
            }
            Op::Xor | Op::Iff | Op::Imp => {
                let (x, y) = (self.t(ch[0]), self.t(ch[1]));
                bool_interval(match op {
                    Op::Xor => x.zip(y).map(|(x, y)| x != y),
                    Op::Iff => x.zip(y).map(|(x, y)| x == y),
                    _ => match (x, y) {
                        (Some(false), _) | (_, Some(true)) => Some(true),
                        (Some(true), Some(false)) => Some(false),
                        _ => None,
                    },
                })
            }
        }
    }

    fn narrow(&mut self, s: &mut DomainStore, n: usize, l: i128, u: i128) -> Outcome {
        let lo = l.max(self.lo[n]);
        let hi = u.min(self.hi[n]);
        if lo > hi {
            return Err(Conflict);
        }
        if (lo, hi) == (self.lo[n], self.hi[n]) && !matches!(self.prog.nodes[n], Node::Op(..)) {
            return Ok(());
        }
        self.lo[n] = lo;
        self.hi[n] = hi;
        match self.prog.nodes[n].clone() {
            Node::Const(_) => Ok(()),
            Node::Var(p) => {
                let v = self.prog.vars[p];
                s.set_min_i128(v, lo)?;
                s.set_max_i128(v, hi)?;
                self.lo[n] = s.min(v) as i128;
                self.hi[n] = s.max(v) as i128;
                Ok(())
            }
            Node::Op(op, ch) => self.narrow_op(s, op, &ch, lo, hi),
        }
    }

    /// Forces the truth value of node `n`.
    fn force(&mut self, s: &mut DomainStore, n: usize, t: bool) -> Outcome {
        if !t {
            return self.narrow(s, n, 0, 0);
        }
        let (lo, hi) = self.iv(n);
        if lo >= 0 {
            self.narrow(s, n, 1, INF)
        } else if hi <= 0 {
            self.narrow(s, n, -INF, -1)
        } else {
            if let Node::Var(p) = self.prog.nodes[n] {
                s.remove(self.prog.vars[p], 0)?;
            }
            Ok(())
        }
    }

    fn narrow_op(&mut self, s: &mut DomainStore, op: Op, ch: &[usize], l: i128, u: i128) -> Outcome {
        let want = match (l > 0, u < 1) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        match op {
            Op::Neg => self.narrow(s, ch[0], -u, -l),
            Op::Abs => {
                let (lo, hi) = abs_inverse(self.lo[ch[0]], self.hi[ch[0]], l, u);
                self.narrow(s, ch[0], lo, hi)?;
                if l > 0 {
                    if let Node::Var(p) = self.prog.nodes[ch[0]] {
                        let v = self.prog.vars[p];
                        s.retain(v, |x| (x as i128).abs() >= l)?;
                    }
                }
                Ok(())
            }
            Op::Add => {
                let slo: i128 = ch.iter().map(|&c| self.lo[c]).sum();
                let shi: i128 = ch.iter().map(|&c| self.hi[c]).sum();
                for &c in ch {
                    let (cl, chh) = self.iv(c);
                    self.narrow(s, c, l.saturating_sub(shi - chh), u.saturating_sub(slo - cl))?;
                }
                Ok(())
            }
            Op::Sub => {
                let (a, b) = (ch[0], ch[1]);
                let bi = self.iv(b);
                self.narrow(s, a, l.saturating_add(bi.0), u.saturating_add(bi.1))?;
                let ai = self.iv(a);
                self.narrow(s, b, ai.0.saturating_sub(u), ai.1.saturating_sub(l))
            }
            Op::Dist => {
                let (a, b) = (ch[0], ch[1]);
                let (ai, bi) = (self.iv(a), self.iv(b));
                let (dl, du) = abs_inverse(ai.0 - bi.1, ai.1 - bi.0, l, u);
                if dl > du {
                    return Err(Conflict);
                }
                self.narrow(s, a, dl + bi.0, du + bi.1)?;
                let ai = self.iv(a);
                self.narrow(s, b, ai.0 - du, ai.1 - dl)
            }
            Op::Mul => {
                if ch.len() != 2 {
                    return Ok(());
                }
                for (x, y) in [(ch[0], ch[1]), (ch[1], ch[0])] {
                    let (yl, yh) = self.iv(y);
                    if yl == yh && yl != 0 {
                        let lo = (l > -INF).then_some(l);
                        let hi = (u < INF).then_some(u);
                        let (lo, hi) = if yl > 0 {
                            (lo.map(|l| div_ceil(l, yl)), hi.map(|h| div_floor(h, yl)))
                        } else {
                            (hi.map(|h| div_ceil(h, yl)), lo.map(|l| div_floor(l, yl)))
                        };
                        self.narrow(s, x, lo.unwrap_or(-INF), hi.unwrap_or(INF))?;
                    }
                }
                Ok(())
            }
            Op::Eq | Op::Ne | Op::Lt | Op::Le | Op::Gt | Op::Ge => {
                let Some(t) = want else { return Ok(()) };
                let (a, b) = (ch[0], ch[1]);
                let rel = match (op, t) {
                    (Op::Eq, true) | (Op::Ne, false) => Op::Eq,
                    (Op::Eq, false) | (Op::Ne, true) => Op::Ne,
                    (Op::Lt, true) | (Op::Ge, false) => Op::Lt,
                    (Op::Le, true) | (Op::Gt, false) => Op::Le,
                    (Op::Gt, true) | (Op::Le, false) => Op::Gt,
                    _ => Op::Ge,
                };
                self.enforce(s, rel, a, b)
            }
            Op::Not => match want {
                Some(t) => self.force(s, ch[0], !t),
                None => Ok(()),
            },
            Op::And | Op::Or => {
                let Some(t) = want else { return Ok(()) };
                // and=true / or=false fix every child; otherwise only the
                // last undecided child can be forced
                let all = if op == Op::And { t } else { !t };
                if all {
                    for &c in ch {
                        self.force(s, c, t)?;
                    }
                    return Ok(());
                }
                let undecided: Vec<usize> = ch.iter().copied().filter(|&c| self.t(c).is_none()).collect();
                let satisfied = ch.iter().any(|&c| self.t(c) == Some(t));
                if !satisfied && undecided.len() == 1 {
                    self.force(s, undecided[0], t)?;
                }
                Ok(())
            }
            Op::Xor | Op::Iff | Op::Imp => {
                let Some(t) = want else { return Ok(()) };
                let (a, b) = (ch[0], ch[1]);
                if op == Op::Imp {
                    if !t {
                        self.force(s, a, true)?;
                        return self.force(s, b, false);
                    }
                    if self.t(a) == Some(true) {
                        self.force(s, b, true)?;
                    }
                    if self.t(b) == Some(false) {
                        self.force(s, a, false)?;
                    }
                    return Ok(());
                }
                let same = (op == Op::Iff) == t;
                if let Some(x) = self.t(a) {
                    self.force(s, b, if same { x } else { !x })?;
                }
                if let Some(y) = self.t(b) {
                    self.force(s, a, if same { y } else { !y })?;
                }
                Ok(())
            }
        }
    }

    fn enforce(&mut self, s: &mut DomainStore, rel: Op, a: usize, b: usize) -> Outcome {
        match rel {
            Op::Eq => {
                let bi = self.iv(b);
                self.narrow(s, a, bi.0, bi.1)?;
                let ai = self.iv(a);
                self.narrow(s, b, ai.0, ai.1)
            }
            Op::Ne => {
                for (x, y) in [(a, b), (b, a)] {
                    let (yl, yh) = self.iv(y);
                    if yl == yh {
                        if let Node::Var(p) = self.prog.nodes[x] {
                            s.remove(self.prog.vars[p], yl as i64)?;
                        } else if self.iv(x) == (yl, yh) {
                            return Err(Conflict);
                        }
                    }
                }
                Ok(())
            }
            Op::Lt | Op::Le => {
                let d = (rel == Op::Lt) as i128;
                let bh = self.hi[b];
                self.narrow(s, a, -INF, bh - d)?;
                let al = self.lo[a];
                self.narrow(s, b, al + d, INF)
            }
            _ => self.enforce(s, if rel == Op::Gt { Op::Lt } else { Op::Le }, b, a),
        }
    }
}

impl Propagator for Hc4 {
    fn scope(&self) -> Vec<VarId> {
        self.prog.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let open: Vec<usize> = (0..self.prog.vars.len())
            .filter(|&p| !s.is_fixed(self.prog.vars[p]))
            .collect();
        for (p, &v) in self.prog.vars.iter().enumerate() {
            self.vals[p] = s.min(v);
        }
        match open.len() {
            0 => {
                if self.prog.holds(&self.vals, &mut self.scratch) {
                    Ok(())
                } else {
                    Err(Conflict)
                }
            }
            1 => {
                let p = open[0];
                let v = self.prog.vars[p];
                let (prog, vals, scratch) = (&self.prog, &mut self.vals, &mut self.scratch);
                s.retain(v, |x| {
                    vals[p] = x;
                    prog.holds(vals, scratch)
                })?;
                Ok(())
            }
            _ => {
                self.forward(s);
                let root = self.prog.root();
                self.force(s, root, true)
            }
        }
    }
}
