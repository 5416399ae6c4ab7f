use super::{Factor, Outcome, Propagator};
use crate::engine::store::{DomainStore, VarId};

/// `list[index] = value` with 0-based indexing.
pub(crate) struct Element {
    list: Vec<VarId>,
    index: VarId,
    value: Factor,
}

impl Element {
    pub fn new(list: Vec<VarId>, index: VarId, value: Factor) -> Element {
        Element { list, index, value }
    }

    fn value_possible(&self, s: &DomainStore, v: i64) -> bool {
        match self.value {
            Factor::Const(c) => c == v,
            Factor::Var(t) => s.contains(t, v),
        }
    }
}

impl Propagator for Element {
    fn scope(&self) -> Vec<VarId> {
        let mut vars = self.list.clone();
        vars.push(self.index);
        vars.extend(self.value.var());
        vars
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let n = self.list.len() as i64;
        let supported: Vec<i64> = s
            .values(self.index)
            .filter(|&i| {
                (0..n).contains(&i)
                    && s.values(self.list[i as usize]).any(|v| self.value_possible(s, v))
            })
            .collect();
        s.retain(self.index, |i| supported.binary_search(&i).is_ok())?;
        if let Factor::Var(t) = self.value {
            let reach: Vec<i64> = s
                .values(t)
                .filter(|&v| s.values(self.index).any(|i| s.contains(self.list[i as usize], v)))
                .collect();
            s.retain(t, |v| reach.binary_search(&v).is_ok())?;
        }
        if let Some(i) = s.value(self.index) {
            let x = self.list[i as usize];
            match self.value {
                Factor::Const(c) => {
                    s.assign(x, c)?;
                }
                Factor::Var(t) => {
                    let allowed: Vec<i64> = s.domain(t);
                    s.retain(x, |v| allowed.binary_search(&v).is_ok())?;
                }
            }
        }
        Ok(())
    }
}

/// `first[i] = j` exactly when `second[j] = i`; with lists of different
/// lengths only the forward direction is required.
pub(crate) struct Channel {
    first: Vec<VarId>,
    second: Vec<VarId>,
}

impl Channel {
    pub fn new(first: Vec<VarId>, second: Vec<VarId>) -> Channel {
        Channel { first, second }
    }
}

impl Propagator for Channel {
    fn scope(&self) -> Vec<VarId> {
        let mut vars = self.first.clone();
        vars.extend(&self.second);
        vars
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let (a, b) = (&self.first, &self.second);
        for (i, &x) in a.iter().enumerate() {
            let keep: Vec<i64> = s
                .values(x)
                .filter(|&j| j >= 0 && (j as usize) < b.len() && s.contains(b[j as usize], i as i64))
                .collect();
            s.retain(x, |j| keep.binary_search(&j).is_ok())?;
            if let Some(j) = s.value(x) {
                s.assign(b[j as usize], i as i64)?;
            }
        }
        if a.len() == b.len() {
            for (j, &y) in b.iter().enumerate() {
                let keep: Vec<i64> = s
                    .values(y)
                    .filter(|&i| i >= 0 && (i as usize) < a.len() && s.contains(a[i as usize], j as i64))
                    .collect();
                s.retain(y, |i| keep.binary_search(&i).is_ok())?;
                if let Some(i) = s.value(y) {
                    s.assign(a[i as usize], j as i64)?;
                }
            }
        }
        Ok(())
    }
}

/// Instantiation: each variable takes its listed value.
pub(crate) struct Fix {
    vars: Vec<VarId>,
    values: Vec<i64>,
}

impl Fix {
    pub fn new(vars: Vec<VarId>, values: Vec<i64>) -> Fix {
        Fix { vars, values }
    }
}

impl Propagator for Fix {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        for (&x, &v) in self.vars.iter().zip(&self.values) {
            s.assign(x, v)?;
        }
        Ok(())
    }
}

/// Every variable takes a value from a fixed set.
pub(crate) struct Member {
    vars: Vec<VarId>,
    values: Vec<i64>,
}

impl Member {
    pub fn new(vars: Vec<VarId>, mut values: Vec<i64>) -> Member {
        values.sort_unstable();
        values.dedup();
        Member { vars, values }
    }
}

impl Propagator for Member {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        for &x in &self.vars {
            s.retain(x, |v| self.values.binary_search(&v).is_ok())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_filters_index_and_value() {
        // list = [{1,2}, {5}, {3}], value in {2,3}
        let mut s = DomainStore::new(vec![vec![1, 2], vec![5], vec![3], (0..4).collect(), vec![2, 3, 4]]);
        let mut p = Element::new(vec![0, 1, 2], 3, Factor::Var(4));
        p.propagate(&mut s).unwrap();
        assert_eq!(s.domain(3), vec![0, 2]);
        assert_eq!(s.domain(4), vec![2, 3]);
    }

    #[test]
    fn channel_is_inverse() {
        let mut s = DomainStore::new(vec![vec![0, 1], vec![0, 1], vec![1], vec![0, 1]]);
        Channel::new(vec![0, 1], vec![2, 3]).propagate(&mut s).unwrap();
        // second[0] = 1 forces first[1] = 0, hence first[0] = 1
        assert_eq!(s.snapshot(), vec![vec![1], vec![0], vec![1], vec![0]]);
    }
}
