use super::{Factor, Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};

/// Time-table filtering from compulsory parts `[max start, min end)`.
/// Filtering is skipped when a length or height is negative; search still
/// checks such tasks on total assignments.
pub(crate) struct Cumulative {
    starts: Vec<VarId>,
    lengths: Vec<i128>,
    heights: Vec<i128>,
    limit: i128,
    filter: bool,
}

/// `(from, to, load)` with `from < to`, sorted and disjoint.
type Profile = Vec<(i128, i128, i128)>;

impl Cumulative {
    pub fn new(starts: Vec<VarId>, lengths: Vec<i64>, heights: Vec<i64>, limit: i64) -> Cumulative {
        let filter = lengths.iter().chain(&heights).all(|&v| v >= 0);
        Cumulative {
            starts,
            lengths: lengths.into_iter().map(i128::from).collect(),
            heights: heights.into_iter().map(i128::from).collect(),
            limit: limit as i128,
            filter,
        }
    }

    fn compulsory(&self, s: &DomainStore, i: usize) -> Option<(i128, i128)> {
        let lst = s.max(self.starts[i]) as i128;
        let ect = s.min(self.starts[i]) as i128 + self.lengths[i];
        (lst < ect && self.heights[i] > 0).then_some((lst, ect))
    }

    fn profile(&self, s: &DomainStore) -> Profile {
        let mut events: Vec<(i128, i128)> = Vec::new();
        for i in 0..self.starts.len() {
            if let Some((a, b)) = self.compulsory(s, i) {
                events.push((a, self.heights[i]));
                events.push((b, -self.heights[i]));
            }
        }
        events.sort_unstable();
        let mut out = Vec::new();
        let mut load = 0;
        for k in 0..events.len() {
            load += events[k].1;
            let t = events[k].0;
            if let Some(&(next, _)) = events.get(k + 1) {
                if next > t && load > 0 {
                    out.push((t, next, load));
                }
            }
        }
        out
    }

    /// Load from other tasks over a segment, removing `i`'s own share.
    fn foreign(&self, s: &DomainStore, i: usize, seg: (i128, i128, i128)) -> i128 {
        match self.compulsory(s, i) {
            Some((a, b)) if a <= seg.0 && seg.1 <= b => seg.2 - self.heights[i],
            _ => seg.2,
        }
    }
}

impl Propagator for Cumulative {
    fn scope(&self) -> Vec<VarId> {
        self.starts.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        if !self.filter {
            return Ok(());
        }
        let profile = self.profile(s);
        if profile.iter().any(|seg| seg.2 > self.limit) {
            return Err(Conflict);
        }
        for i in 0..self.starts.len() {
            let (len, h) = (self.lengths[i], self.heights[i]);
            let x = self.starts[i];
            if len == 0 || h == 0 || s.is_fixed(x) {
                continue;
            }
            let blocks = |s: &DomainStore, t: i128| {
                profile.iter().find(|seg| {
                    seg.0 < t + len && t < seg.1 && self.foreign(s, i, **seg) + h > self.limit
                }).copied()
            };
            loop {
                let t = s.min(x) as i128;
                match blocks(s, t) {
                    Some(seg) => {
                        s.set_min_i128(x, seg.1)?;
                    }
                    None => break,
                }
            }
            loop {
                let t = s.max(x) as i128;
                match blocks(s, t) {
                    Some(seg) => {
                        s.set_max_i128(x, seg.0 - len)?;
                    }
                    None => break,
                }
            }
        }
        Ok(())
    }
}

/// Pairwise non-overlap of boxes `(x, y, w, h)`: when only one of the four
/// separations remains possible it is enforced on bounds.
pub(crate) struct NoOverlap {
    boxes: Vec<[Factor; 4]>,
}

impl NoOverlap {
    pub fn new(boxes: Vec<[Factor; 4]>) -> NoOverlap {
        NoOverlap { boxes }
    }
}

fn lo(s: &DomainStore, f: Factor) -> i128 {
    f.bounds(s).0 as i128
}

fn hi(s: &DomainStore, f: Factor) -> i128 {
    f.bounds(s).1 as i128
}

/// `a + l <= b` is still possible.
fn possible(s: &DomainStore, a: Factor, l: Factor, b: Factor) -> bool {
    lo(s, a) + lo(s, l) <= hi(s, b)
}

fn enforce(s: &mut DomainStore, a: Factor, l: Factor, b: Factor) -> Outcome {
    if let Factor::Var(v) = a {
        s.set_max_i128(v, hi(s, b) - lo(s, l))?;
    }
    if let Factor::Var(v) = b {
        s.set_min_i128(v, lo(s, a) + lo(s, l))?;
    }
    if let Factor::Var(v) = l {
        s.set_max_i128(v, hi(s, b) - lo(s, a))?;
    }
    Ok(())
}

impl Propagator for NoOverlap {
    fn scope(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self.boxes.iter().flatten().filter_map(|f| f.var()).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        for i in 0..self.boxes.len() {
            for j in i + 1..self.boxes.len() {
                let [xi, yi, wi, hi_] = self.boxes[i];
                let [xj, yj, wj, hj] = self.boxes[j];
                let options = [(xi, wi, xj), (xj, wj, xi), (yi, hi_, yj), (yj, hj, yi)];
                let open: Vec<_> = options
                    .iter()
                    .filter(|(a, l, b)| possible(s, *a, *l, *b))
                    .collect();
                match open.as_slice() {
                    [] => return Err(Conflict),
                    [(a, l, b)] => enforce(s, *a, *l, *b)?,
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
    fn compulsory_parts_push_starts() {
        // task 0 fixed at [0, 3) with height 2; task 1 (len 2, h 1) limit 2
        let mut s = DomainStore::new(vec![vec![0], (0..6).collect()]);
        let mut p = Cumulative::new(vec![0, 1], vec![3, 2], vec![2, 1], 2);
        p.propagate(&mut s).unwrap();
        assert_eq!(s.domain(1), vec![3, 4, 5]);
    }

    #[test]
    fn overload_conflicts() {
        let mut s = DomainStore::new(vec![vec![0], vec![1]]);
        let mut p = Cumulative::new(vec![0, 1], vec![3, 2], vec![2, 1], 2);
        assert!(p.propagate(&mut s).is_err());
    }

    #[test]
    fn single_separation_is_enforced() {
        // two unit squares on a 2x1 strip: y fixed, box 0 at x = 0
        let mut s = DomainStore::new(vec![vec![0], (0..2).collect(), vec![0], vec![0]]);
        let boxes = vec![
            [Factor::Var(0), Factor::Var(2), Factor::Const(1), Factor::Const(1)],
            [Factor::Var(1), Factor::Var(3), Factor::Const(1), Factor::Const(1)],
        ];
        NoOverlap::new(boxes).propagate(&mut s).unwrap();
        assert_eq!(s.domain(1), vec![1]);
    }
}
