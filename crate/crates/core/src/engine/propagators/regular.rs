use super::{Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};
use crate::model::Automaton;

/// Forward reachability and backward co-reachability over the layered
/// state graph; a value survives when it labels an edge on some
/// start-to-final path.
pub(crate) struct Regular {
    vars: Vec<VarId>,
    start: usize,
    finals: Vec<bool>,
    /// `delta[i][k][q]`: successor of state `q` on the `k`-th initial
    /// value of `vars[i]`.
    delta: Vec<Vec<Vec<Option<usize>>>>,
    states: usize,
}

impl Regular {
    pub fn new(vars: Vec<VarId>, a: &Automaton, s: &DomainStore) -> Regular {
        let names = a.states();
        let id = |q: &str| names.binary_search(&q).unwrap();
        let delta = vars
            .iter()
            .map(|&x| {
                s.initial(x)
                    .iter()
                    .map(|&sym| names.iter().map(|q| a.next(q, sym).map(id)).collect())
                    .collect()
            })
            .collect();
        let mut finals = vec![false; names.len()];
        for f in &a.finals {
            finals[id(f)] = true;
        }
        Regular {
            start: id(&a.start),
            finals,
            delta,
            states: names.len(),
            vars,
        }
    }
}

impl Propagator for Regular {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let n = self.vars.len();
        let mut reach = vec![vec![false; self.states]; n + 1];
        reach[0][self.start] = true;
        for i in 0..n {
            for k in s.indices(self.vars[i]) {
                for q in 0..self.states {
                    if reach[i][q] {
                        if let Some(r) = self.delta[i][k][q] {
                            reach[i + 1][r] = true;
                        }
                    }
                }
            }
        }
        let mut alive = reach;
        for q in 0..self.states {
            alive[n][q] &= self.finals[q];
        }
        let mut keep: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in (0..n).rev() {
            let mut next = vec![false; self.states];
            for k in s.indices(self.vars[i]) {
                let mut used = false;
                for q in 0..self.states {
                    if alive[i][q] {
                        if let Some(r) = self.delta[i][k][q] {
                            if alive[i + 1][r] {
                                next[q] = true;
                                used = true;
                            }
                        }
                    }
                }
                if used {
                    keep[i].push(k);
                }
            }
            alive[i] = next;
        }
        if !alive[0][self.start] {
            return Err(Conflict);
        }
        for (i, ks) in keep.iter().enumerate() {
            s.retain_indices(self.vars[i], |k| ks.binary_search(&k).is_ok())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ends_with_one() {
        // words over {0,1} ending in 1
        let a = Automaton::new(
            "a",
            vec![
                ("a".into(), 0, "a".into()),
                ("a".into(), 1, "b".into()),
                ("b".into(), 0, "a".into()),
                ("b".into(), 1, "b".into()),
            ],
            vec!["b".to_string()],
        );
        let mut s = DomainStore::new(vec![vec![0, 1]; 3]);
        let mut p = Regular::new(vec![0, 1, 2], &a, &s);
        p.propagate(&mut s).unwrap();
        assert_eq!(s.domain(2), vec![1]);
        assert_eq!(s.domain(0), vec![0, 1]);
    }
}
