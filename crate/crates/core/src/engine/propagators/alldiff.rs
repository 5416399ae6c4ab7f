use std::collections::BTreeSet;

use super::{Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};

/// Removal of assigned values, Hall intervals on bounds, and a pigeonhole
/// check on the union of domains.
pub(crate) struct AllDifferent {
    vars: Vec<VarId>,
    repeated: bool,
}

impl AllDifferent {
    pub fn new(vars: Vec<VarId>) -> AllDifferent {
        let distinct: BTreeSet<VarId> = vars.iter().copied().collect();
        AllDifferent {
            repeated: distinct.len() != vars.len(),
            vars,
        }
    }

    fn eliminate(&self, s: &mut DomainStore) -> Outcome {
        let mut done = vec![false; self.vars.len()];
        loop {
            let mut progress = false;
            for i in 0..self.vars.len() {
                if done[i] {
                    continue;
                }
                let Some(v) = s.value(self.vars[i]) else { continue };
                done[i] = true;
                progress = true;
                for (j, &y) in self.vars.iter().enumerate() {
                    if j != i {
                        s.remove(y, v)?;
                    }
                }
            }
            if !progress {
                return Ok(());
            }
        }
    }

    fn hall(&self, s: &mut DomainStore) -> Outcome {
        let n = self.vars.len();
        let bounds: Vec<(i64, i64)> = self.vars.iter().map(|&x| (s.min(x), s.max(x))).collect();
        let mut by_max: Vec<usize> = (0..n).collect();
        by_max.sort_by_key(|&i| bounds[i].1);
        let mut mins: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        mins.sort_unstable();
        mins.dedup();
        let mut halls: Vec<(i64, i64)> = Vec::new();
        for &a in &mins {
            let mut count: i128 = 0;
            for &i in &by_max {
                if bounds[i].0 >= a {
                    count += 1;
                    let b = bounds[i].1;
                    let width = b as i128 - a as i128 + 1;
                    if count > width {
                        return Err(Conflict);
                    }
                    if count == width {
                        halls.push((a, b));
                    }
                }
            }
        }
        for (a, b) in halls {
            for (i, &x) in self.vars.iter().enumerate() {
                let (lo, hi) = bounds[i];
                if lo >= a && hi <= b {
                    continue;
                }
                if (a..=b).contains(&s.min(x)) {
                    s.set_min(x, b.saturating_add(1))?;
                }
                if (a..=b).contains(&s.max(x)) {
                    s.set_max(x, a.saturating_sub(1))?;
                }
            }
        }
        Ok(())
    }

    fn pigeonhole(&self, s: &DomainStore) -> Outcome {
        let mut union = BTreeSet::new();
        for &x in &self.vars {
            union.extend(s.values(x));
            if union.len() >= self.vars.len() {
                return Ok(());
            }
        }
        Err(Conflict)
    }
}

impl Propagator for AllDifferent {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        if self.repeated {
            return Err(Conflict);
        }
        self.eliminate(s)?;
        self.hall(s)?;
        self.pigeonhole(s)
    }
}

/// Subtour elimination for successor variables where `x_i = i` leaves node
/// `i` out of the single cycle. Value distinctness is left to a companion
/// [`AllDifferent`].
pub(crate) struct Circuit {
    vars: Vec<VarId>,
}

impl Circuit {
    pub fn new(vars: Vec<VarId>) -> Circuit {
        Circuit { vars }
    }

    fn succ(&self, s: &DomainStore, i: usize) -> Option<usize> {
        s.value(self.vars[i])
            .map(|v| v as usize)
            .filter(|&j| j != i)
    }
}

impl Propagator for Circuit {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let n = self.vars.len();
        for &x in &self.vars {
            s.set_min(x, 0)?;
            s.set_max(x, n as i64 - 1)?;
        }
        let mut has_pred = vec![false; n];
        for i in 0..n {
            if let Some(j) = self.succ(s, i) {
                if has_pred[j] {
                    return Err(Conflict);
                }
                has_pred[j] = true;
            }
        }
        let mut seen = vec![false; n];
        // chains h -> ... -> e with e unfixed must not close early
        for h in 0..n {
            if has_pred[h] || self.succ(s, h).is_none() {
                continue;
            }
            let mut chain = vec![h];
            seen[h] = true;
            let mut e = h;
            while let Some(j) = self.succ(s, e) {
                seen[j] = true;
                chain.push(j);
                e = j;
            }
            if s.is_fixed(self.vars[e]) {
                // a chain ending in a self loop already has two preds on e
                return Err(Conflict);
            }
            let inside: BTreeSet<usize> = chain.iter().copied().collect();
            let others_can_idle =
                (0..n).all(|k| inside.contains(&k) || s.contains(self.vars[k], k as i64));
            if !others_can_idle {
                s.remove(self.vars[e], h as i64)?;
            }
        }
        // any node left unseen with a fixed successor lies on a closed cycle
        let mut cycle: Option<Vec<usize>> = None;
        for i in 0..n {
            if seen[i] || self.succ(s, i).is_none() {
                continue;
            }
            if cycle.is_some() {
                return Err(Conflict);
            }
            let mut nodes = vec![i];
            seen[i] = true;
            let mut j = self.succ(s, i).unwrap();
            while j != i {
                seen[j] = true;
                nodes.push(j);
                j = self.succ(s, j).unwrap();
            }
            cycle = Some(nodes);
        }
        match cycle {
            Some(nodes) => {
                for k in 0..n {
                    if !nodes.contains(&k) {
                        s.assign(self.vars[k], k as i64)?;
                    }
                }
            }
            None => {
                if (0..n).all(|i| s.value(self.vars[i]) == Some(i as i64)) {
                    return Err(Conflict);
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
    fn pigeonhole_conflict() {
        let mut s = DomainStore::new(vec![vec![1, 2]; 3]);
        assert!(AllDifferent::new(vec![0, 1, 2]).propagate(&mut s).is_err());
    }

    #[test]
    fn hall_interval_prunes_bounds() {
        let mut s = DomainStore::new(vec![vec![1, 2], vec![1, 2], (1..=4).collect()]);
        AllDifferent::new(vec![0, 1, 2]).propagate(&mut s).unwrap();
        assert_eq!(s.domain(2), vec![3, 4]);
    }

    #[test]
    fn circuit_blocks_premature_closure() {
        // 0 -> 1 fixed; node 2 cannot idle, so 1 -> 0 would strand it
        let mut s = DomainStore::new(vec![vec![1], vec![0, 1, 2], vec![0, 1]]);
        Circuit::new(vec![0, 1, 2]).propagate(&mut s).unwrap();
        assert_eq!(s.domain(1), vec![1, 2]);
    }

    #[test]
    fn closed_cycle_idles_the_rest() {
        let mut s = DomainStore::new(vec![vec![1], vec![0], vec![0, 1, 2]]);
        Circuit::new(vec![0, 1, 2]).propagate(&mut s).unwrap();
        assert_eq!(s.domain(2), vec![2]);
    }
}
