use super::{Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};
use crate::model::OrderOp;

/// Chained bounds for `x_0 op x_1 op ...`.
pub(crate) struct Ordered {
    vars: Vec<VarId>,
    op: OrderOp,
}

impl Ordered {
    pub fn new(vars: Vec<VarId>, op: OrderOp) -> Ordered {
        Ordered { vars, op }
    }
}

impl Propagator for Ordered {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let d = self.op.is_strict() as i128;
        // ascending view: a op b means low(a) + d <= b
        let vars: Vec<VarId> = if self.op.is_increasing() {
            self.vars.clone()
        } else {
            self.vars.iter().rev().copied().collect()
        };
        for w in vars.windows(2) {
            s.set_min_i128(w[1], s.min(w[0]) as i128 + d)?;
        }
        for w in vars.windows(2).rev() {
            s.set_max_i128(w[0], s.max(w[1]) as i128 - d)?;
        }
        Ok(())
    }
}

/// `xs <=lex ys` (or `<lex` when strict) over equal-length vectors.
pub(crate) struct LexPair {
    xs: Vec<VarId>,
    ys: Vec<VarId>,
    strict: bool,
}

impl LexPair {
    pub fn new(xs: Vec<VarId>, ys: Vec<VarId>, strict: bool) -> LexPair {
        LexPair { xs, ys, strict }
    }

    fn equal_at(&self, s: &DomainStore, k: usize) -> bool {
        let (x, y) = (self.xs[k], self.ys[k]);
        x == y || (s.is_fixed(x) && s.is_fixed(y) && s.min(x) == s.min(y))
    }
}

impl Propagator for LexPair {
    fn scope(&self) -> Vec<VarId> {
        let mut vars = self.xs.clone();
        vars.extend(&self.ys);
        vars
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let n = self.xs.len().min(self.ys.len());
        let mut a = 0;
        loop {
            while a < n && self.equal_at(s, a) {
                a += 1;
            }
            if a == n {
                return if self.strict { Err(Conflict) } else { Ok(()) };
            }
            let (x, y) = (self.xs[a], self.ys[a]);
            // with an equal tail a strict order must be decided here
            let tail_equal = self.strict && (a + 1..n).all(|k| self.equal_at(s, k));
            let d = tail_equal as i128;
            s.set_max_i128(x, s.max(y) as i128 - d)?;
            s.set_min_i128(y, s.min(x) as i128 + d)?;
            if !self.equal_at(s, a) {
                return Ok(());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strictly_increasing_chain() {
        let mut s = DomainStore::new(vec![(0..5).collect(); 3]);
        Ordered::new(vec![0, 1, 2], OrderOp::Lt).propagate(&mut s).unwrap();
        assert_eq!(s.snapshot(), vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]);
        let mut s = DomainStore::new(vec![(0..5).collect(); 2]);
        Ordered::new(vec![0, 1], OrderOp::Ge).propagate(&mut s).unwrap();
        assert_eq!(s.domain(0), (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn lex_prefix_decides() {
        // (1, x) <lex (1, y) with x, y in 0..3 gives x < y
        let mut s = DomainStore::new(vec![vec![1], (0..3).collect(), vec![1], (0..3).collect()]);
        LexPair::new(vec![0, 1], vec![2, 3], true).propagate(&mut s).unwrap();
        assert_eq!(s.domain(1), vec![0, 1]);
        assert_eq!(s.domain(3), vec![1, 2]);
    }

    #[test]
    fn equal_vectors_fail_strict() {
        let mut s = DomainStore::new(vec![vec![2], vec![2]]);
        assert!(LexPair::new(vec![0], vec![1], true).propagate(&mut s).is_err());
        assert!(LexPair::new(vec![0], vec![1], false).propagate(&mut s).is_ok());
    }
}
