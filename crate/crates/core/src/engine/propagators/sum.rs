use super::{narrow_scaled, Factor, Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};
use crate::model::{Relation, Sense};

/// Right-hand side of a sum or count, with constant comparisons folded
/// into an allowed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cond {
    Range(Option<i128>, Option<i128>),
    Ne(i128),
    Var(Relation, VarId),
}

/// `sum(coef_i * x_i) <cond>` by bounds reasoning. A variable right-hand
/// side is moved to the left with coefficient -1.
pub(crate) struct Linear {
    terms: Vec<(Factor, VarId)>,
    lo: Option<i128>,
    hi: Option<i128>,
    ne: Option<i128>,
    /// Bound read from the store's objective bound instead of `lo`/`hi`.
    objective: Option<Sense>,
}

fn product_bounds(s: &DomainStore, coef: Factor, x: VarId) -> (i128, i128) {
    let (a, b) = coef.bounds(s);
    let (c, d) = (s.min(x) as i128, s.max(x) as i128);
    let (a, b) = (a as i128, b as i128);
    let corners = [a * c, a * d, b * c, b * d];
    (
        *corners.iter().min().unwrap(),
        *corners.iter().max().unwrap(),
    )
}

impl Linear {
    pub fn new(mut terms: Vec<(Factor, VarId)>, cond: Cond) -> Linear {
        let (lo, hi, ne) = match cond {
            Cond::Range(lo, hi) => (lo, hi, None),
            Cond::Ne(k) => (None, None, Some(k)),
            Cond::Var(rel, r) => {
                terms.push((Factor::Const(-1), r));
                match rel {
                    Relation::Lt => (None, Some(-1), None),
                    Relation::Le => (None, Some(0), None),
                    Relation::Ge => (Some(0), None, None),
                    Relation::Gt => (Some(1), None, None),
                    Relation::Eq => (Some(0), Some(0), None),
                    Relation::Ne => (None, None, Some(0)),
                }
            }
        };
        Linear {
            terms,
            lo,
            hi,
            ne,
            objective: None,
        }
    }

    /// Strict improvement over the incumbent objective value.
    pub fn objective(terms: Vec<(Factor, VarId)>, sense: Sense) -> Linear {
        Linear {
            terms,
            lo: None,
            hi: None,
            ne: None,
            objective: Some(sense),
        }
    }

    fn bounds(&self, s: &DomainStore) -> Option<(Option<i128>, Option<i128>)> {
        match self.objective {
            None => Some((self.lo, self.hi)),
            Some(sense) => {
                let b = s.objective_bound()? as i128;
                Some(match sense {
                    Sense::Minimize => (None, Some(b - 1)),
                    Sense::Maximize => (Some(b + 1), None),
                })
            }
        }
    }

    fn propagate_ne(&self, s: &mut DomainStore, k: i128) -> Outcome {
        let mut open: Option<VarId> = None;
        let mut occurrences = 0;
        for &(c, x) in &self.terms {
            for v in [c.var(), Some(x)].into_iter().flatten() {
                if !s.is_fixed(v) {
                    if open.is_some_and(|o| o != v) {
                        return Ok(());
                    }
                    open = Some(v);
                    occurrences += 1;
                }
            }
        }
        let Some(u) = open else {
            let total: i128 = self
                .terms
                .iter()
                .map(|&(c, x)| c.value(s).unwrap() as i128 * s.min(x) as i128)
                .sum();
            return if total == k { Err(Conflict) } else { Ok(()) };
        };
        if occurrences > 1 {
            return Ok(());
        }
        let mut rest: i128 = 0;
        let mut factor: i128 = 0;
        for &(c, x) in &self.terms {
            if x == u {
                factor = c.value(s).unwrap() as i128;
            } else if c.var() == Some(u) {
                factor = s.min(x) as i128;
            } else {
                rest += c.value(s).unwrap() as i128 * s.min(x) as i128;
            }
        }
        let target = k - rest;
        if factor == 0 {
            return if target == 0 { Err(Conflict) } else { Ok(()) };
        }
        if target % factor == 0 {
            let v = target / factor;
            if let Ok(v) = i64::try_from(v) {
                s.remove(u, v)?;
            }
        }
        Ok(())
    }
}

impl Propagator for Linear {
    fn scope(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .terms
            .iter()
            .flat_map(|&(c, x)| [c.var(), Some(x)])
            .flatten()
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        if let Some(k) = self.ne {
            return self.propagate_ne(s, k);
        }
        let Some((lo, hi)) = self.bounds(s) else {
            return Ok(());
        };
        let parts: Vec<(i128, i128)> = self
            .terms
            .iter()
            .map(|&(c, x)| product_bounds(s, c, x))
            .collect();
        let smin: i128 = parts.iter().map(|p| p.0).sum();
        let smax: i128 = parts.iter().map(|p| p.1).sum();
        if hi.is_some_and(|h| smin > h) || lo.is_some_and(|l| smax < l) {
            return Err(Conflict);
        }
        for (i, &(c, x)) in self.terms.iter().enumerate() {
            let (tmin, tmax) = parts[i];
            let tl = lo.map(|l| l - (smax - tmax));
            let tu = hi.map(|h| h - (smin - tmin));
            if tl.is_none_or(|l| l <= tmin) && tu.is_none_or(|u| u >= tmax) {
                continue;
            }
            if let Some(k) = c.value(s) {
                narrow_scaled(s, x, k as i128, tl, tu)?;
            } else if let (Some(xv), Some(cv)) = (s.value(x), c.var()) {
                narrow_scaled(s, cv, xv as i128, tl, tu)?;
            }
        }
        Ok(())
    }
}

/// `#{i : x_i in values} <cond>` by counting sure and possible hits.
pub(crate) struct Count {
    vars: Vec<VarId>,
    values: Vec<i64>,
    cond: Cond,
}

impl Count {
    pub fn new(vars: Vec<VarId>, mut values: Vec<i64>, cond: Cond) -> Count {
        values.sort_unstable();
        values.dedup();
        Count { vars, values, cond }
    }

    fn hit(&self, x: i64) -> bool {
        self.values.binary_search(&x).is_ok()
    }
}

impl Propagator for Count {
    fn scope(&self) -> Vec<VarId> {
        let mut vars = self.vars.clone();
        if let Cond::Var(_, r) = self.cond {
            vars.push(r);
        }
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let mut must: i128 = 0;
        let mut possible: i128 = 0;
        for &x in &self.vars {
            let any = s.values(x).any(|v| self.hit(v));
            if any {
                possible += 1;
                if s.values(x).all(|v| self.hit(v)) {
                    must += 1;
                }
            }
        }
        let (lo, hi) = match self.cond {
            Cond::Range(lo, hi) => (lo, hi),
            Cond::Ne(k) => {
                return if must == possible && must == k {
                    Err(Conflict)
                } else {
                    Ok(())
                };
            }
            Cond::Var(rel, r) => {
                match rel {
                    Relation::Eq => {
                        s.set_min_i128(r, must)?;
                        s.set_max_i128(r, possible)?;
                    }
                    Relation::Lt => {
                        s.set_min_i128(r, must + 1)?;
                    }
                    Relation::Le => {
                        s.set_min_i128(r, must)?;
                    }
                    Relation::Gt => {
                        s.set_max_i128(r, possible - 1)?;
                    }
                    Relation::Ge => {
                        s.set_max_i128(r, possible)?;
                    }
                    Relation::Ne => {
                        if must == possible {
                            if let Ok(m) = i64::try_from(must) {
                                s.remove(r, m)?;
                            }
                        }
                        return Ok(());
                    }
                }
                let (rmin, rmax) = (s.min(r) as i128, s.max(r) as i128);
                match rel {
                    Relation::Eq => (Some(rmin), Some(rmax)),
                    Relation::Lt => (None, Some(rmax - 1)),
                    Relation::Le => (None, Some(rmax)),
                    Relation::Gt => (Some(rmin + 1), None),
                    _ => (Some(rmin), None),
                }
            }
        };
        let l = lo.unwrap_or(i128::MIN).max(must);
        let u = hi.unwrap_or(i128::MAX).min(possible);
        if l > u {
            return Err(Conflict);
        }
        if possible == l || must == u {
            let into = possible == l;
            for i in 0..self.vars.len() {
                let x = self.vars[i];
                let mixed = s.values(x).any(|v| self.hit(v)) && s.values(x).any(|v| !self.hit(v));
                if mixed {
                    let values = &self.values;
                    s.retain(x, |v| values.binary_search(&v).is_ok() == into)?;
                }
            }
        }
        Ok(())
    }
}

/// Strict improvement over the incumbent for variable and maximum
/// objectives.
pub(crate) enum ObjectiveBound {
    Var(VarId, Sense),
    Max(Vec<VarId>, Sense),
}

impl Propagator for ObjectiveBound {
    fn scope(&self) -> Vec<VarId> {
        match self {
            ObjectiveBound::Var(v, _) => vec![*v],
            ObjectiveBound::Max(vs, _) => vs.clone(),
        }
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let Some(b) = s.objective_bound() else {
            return Ok(());
        };
        let b = b as i128;
        match self {
            ObjectiveBound::Var(v, Sense::Minimize) => {
                s.set_max_i128(*v, b - 1)?;
            }
            ObjectiveBound::Var(v, Sense::Maximize) => {
                s.set_min_i128(*v, b + 1)?;
            }
            ObjectiveBound::Max(vs, Sense::Minimize) => {
                for &v in vs.iter() {
                    s.set_max_i128(v, b - 1)?;
                }
            }
            ObjectiveBound::Max(vs, Sense::Maximize) => {
                let mut above = vs.iter().copied().filter(|&v| s.max(v) as i128 > b);
                match (above.next(), above.next()) {
                    (None, _) => return Err(Conflict),
                    (Some(v), None) => {
                        s.set_min_i128(v, b + 1)?;
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_bounds() {
        let mut s = DomainStore::new(vec![(0..=5).collect(), vec![4, 5]]);
        let mut p = Linear::new(
            vec![(Factor::Const(1), 0), (Factor::Const(1), 1)],
            Cond::Range(Some(5), Some(5)),
        );
        p.propagate(&mut s).unwrap();
        assert_eq!(s.domain(0), vec![0, 1]);
    }

    #[test]
    fn variable_coefficients_narrow_once_fixed() {
        // c * x <= 6 with c fixed to 3
        let mut s = DomainStore::new(vec![vec![3], (0..10).collect()]);
        let mut p = Linear::new(vec![(Factor::Var(0), 1)], Cond::Range(None, Some(6)));
        p.propagate(&mut s).unwrap();
        assert_eq!(s.domain(1), vec![0, 1, 2]);
    }

    #[test]
    fn count_forces_remaining_hits() {
        let mut s = DomainStore::new(vec![vec![1], vec![0, 1], vec![0, 1, 2]]);
        let mut p = Count::new(vec![0, 1, 2], vec![1], Cond::Range(Some(3), None));
        p.propagate(&mut s).unwrap();
        assert_eq!(s.snapshot(), vec![vec![1], vec![1], vec![1]]);
    }

    #[test]
    fn ne_removes_last_value() {
        let mut s = DomainStore::new(vec![vec![2], (0..5).collect()]);
        let mut p = Linear::new(
            vec![(Factor::Const(1), 0), (Factor::Const(2), 1)],
            Cond::Ne(6),
        );
        p.propagate(&mut s).unwrap();
        assert_eq!(s.domain(1), vec![0, 1, 3, 4]);
    }
}
