use super::{fail, Outcome, Propagator};
use crate::engine::store::{Conflict, DomainStore, VarId};
use crate::model::{Cell, Polarity, Table};

/// Conflicts tables over at most this many initial tuples are turned into
/// supports.
const NEGATION_LIMIT: u128 = 100_000;

/// A row over the distinct scope variables; `None` accepts any value,
/// `Some(k)` only the `k`-th initial value.
pub(crate) type Row = Vec<Option<usize>>;

/// Folds scope positions onto distinct variables. `None` when the row can
/// never match because a repeated variable gets two values or a value lies
/// outside the initial domain.
fn project(
    s: &DomainStore,
    scope: &[VarId],
    vars: &[VarId],
    cells: &[Cell],
) -> Option<Vec<Option<i64>>> {
    let mut out: Vec<Option<i64>> = vec![None; vars.len()];
    for (&x, cell) in scope.iter().zip(cells) {
        let p = vars.iter().position(|&v| v == x).unwrap();
        if let Cell::Value(a) = *cell {
            match out[p] {
                Some(b) if b != a => return None,
                _ => out[p] = Some(a),
            }
        }
    }
    for (p, cell) in out.iter().enumerate() {
        if let Some(a) = cell {
            s.index_of(vars[p], *a)?;
        }
    }
    Some(out)
}

fn distinct(scope: &[VarId]) -> Vec<VarId> {
    let mut vars = Vec::new();
    for &x in scope {
        if !vars.contains(&x) {
            vars.push(x);
        }
    }
    vars
}

pub(crate) fn build(scope: &[VarId], table: &Table, s: &mut DomainStore) -> Box<dyn Propagator> {
    let vars = distinct(scope);
    let projected = table
        .rows()
        .iter()
        .filter_map(|r| project(s, scope, &vars, r));
    match table.polarity() {
        Polarity::Supports => {
            let rows: Vec<Row> = projected
                .map(|r| {
                    r.iter()
                        .zip(&vars)
                        .map(|(c, &v)| c.map(|a| s.index_of(v, a).unwrap()))
                        .collect()
                })
                .collect();
            box_table(vars, rows, s)
        }
        Polarity::Conflicts => {
            let conflicts: Vec<Vec<Option<i64>>> = projected.collect();
            let product = vars
                .iter()
                .map(|&v| s.initial(v).len() as u128)
                .try_fold(1u128, |acc, n| acc.checked_mul(n))
                .unwrap_or(u128::MAX);
            if product <= NEGATION_LIMIT {
                let rows = negate(s, &vars, &conflicts, product as usize);
                box_table(vars, rows, s)
            } else {
                Box::new(ConflictsFc {
                    vars,
                    rows: conflicts,
                })
            }
        }
    }
}

fn box_table(vars: Vec<VarId>, rows: Vec<Row>, s: &mut DomainStore) -> Box<dyn Propagator> {
    if vars.is_empty() {
        return if rows.is_empty() {
            fail()
        } else {
            Box::new(Always)
        };
    }
    Box::new(CompactTable::new(vars, rows, s))
}

struct Always;

impl Propagator for Always {
    fn scope(&self) -> Vec<VarId> {
        Vec::new()
    }

    fn propagate(&mut self, _: &mut DomainStore) -> Outcome {
        Ok(())
    }
}

/// Every tuple of the initial domain product not matched by a conflict.
fn negate(
    s: &DomainStore,
    vars: &[VarId],
    conflicts: &[Vec<Option<i64>>],
    product: usize,
) -> Vec<Row> {
    let sizes: Vec<usize> = vars.iter().map(|&v| s.initial(v).len()).collect();
    let mut forbidden = vec![false; product];
    for row in conflicts {
        let fixed: Vec<Option<usize>> = row
            .iter()
            .zip(vars)
            .map(|(c, &v)| c.map(|a| s.index_of(v, a).unwrap()))
            .collect();
        for_each_tuple(&sizes, &fixed, |code| forbidden[code] = true);
    }
    let free = vec![None; vars.len()];
    let mut rows = Vec::new();
    let mut digits = vec![0usize; vars.len()];
    for_each_tuple(&sizes, &free, |code| {
        if !forbidden[code] {
            let mut c = code;
            for p in (0..sizes.len()).rev() {
                digits[p] = c % sizes[p];
                c /= sizes[p];
            }
            rows.push(digits.iter().map(|&k| Some(k)).collect());
        }
    });
    rows
}

/// Calls `f` with the mixed-radix code of every tuple agreeing with
/// `fixed`.
fn for_each_tuple(sizes: &[usize], fixed: &[Option<usize>], mut f: impl FnMut(usize)) {
    let n = sizes.len();
    let mut digits: Vec<usize> = fixed.iter().map(|d| d.unwrap_or(0)).collect();
    loop {
        f(digits.iter().zip(sizes).fold(0, |acc, (&d, &m)| acc * m + d));
        let mut p = n;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if fixed[p].is_some() {
                continue;
            }
            digits[p] += 1;
            if digits[p] < sizes[p] {
                break;
            }
            digits[p] = 0;
        }
    }
}

/// Bit-set table filtering with residual supports. The set of live rows is
/// kept in reversible store slots.
pub(crate) struct CompactTable {
    vars: Vec<VarId>,
    /// `supports[p][k]`: rows compatible with the `k`-th initial value of
    /// `vars[p]`.
    supports: Vec<Vec<Vec<u64>>>,
    residues: Vec<Vec<usize>>,
    words: usize,
    live_at: usize,
    size_at: usize,
    mask: Vec<u64>,
}

impl CompactTable {
    pub fn new(vars: Vec<VarId>, rows: Vec<Row>, s: &mut DomainStore) -> CompactTable {
        let words = rows.len().div_ceil(64).max(1);
        let mut supports: Vec<Vec<Vec<u64>>> = vars
            .iter()
            .map(|&v| vec![vec![0u64; words]; s.initial(v).len()])
            .collect();
        for (r, row) in rows.iter().enumerate() {
            for (p, cell) in row.iter().enumerate() {
                match cell {
                    Some(k) => supports[p][*k][r / 64] |= 1 << (r % 64),
                    None => {
                        for bits in supports[p].iter_mut() {
                            bits[r / 64] |= 1 << (r % 64);
                        }
                    }
                }
            }
        }
        let live_at = s.alloc_slots(words, 0);
        for w in 0..words {
            let lo = w * 64;
            let n = rows.len().saturating_sub(lo).min(64);
            let bits = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.set_slot(live_at + w, bits);
        }
        let size_at = s.alloc_slots(vars.len(), u64::MAX);
        CompactTable {
            residues: vars.iter().map(|&v| vec![0; s.initial(v).len()]).collect(),
            vars,
            supports,
            words,
            live_at,
            size_at,
            mask: vec![0; words],
        }
    }

    /// Narrows the live rows to those compatible with changed domains.
    fn update(&mut self, s: &mut DomainStore) -> Outcome {
        for p in 0..self.vars.len() {
            let v = self.vars[p];
            if s.slot(self.size_at + p) == s.size(v) as u64 {
                continue;
            }
            s.set_slot(self.size_at + p, s.size(v) as u64);
            self.mask.iter_mut().for_each(|m| *m = 0);
            for k in s.indices(v) {
                for (m, b) in self.mask.iter_mut().zip(&self.supports[p][k]) {
                    *m |= b;
                }
            }
            let mut any = false;
            for w in 0..self.words {
                let cur = s.slot(self.live_at + w);
                let new = cur & self.mask[w];
                if new != cur {
                    s.set_slot(self.live_at + w, new);
                }
                any |= new != 0;
            }
            if !any {
                return Err(Conflict);
            }
        }
        Ok(())
    }

    fn filter(&mut self, s: &mut DomainStore) -> Outcome {
        for p in 0..self.vars.len() {
            let v = self.vars[p];
            let present: Vec<usize> = s.indices(v).collect();
            let mut changed = false;
            for k in present {
                let bits = &self.supports[p][k];
                let live = s.slots(self.live_at, self.words);
                let r = self.residues[p][k];
                if bits[r] & live[r] != 0 {
                    continue;
                }
                match (0..self.words).find(|&w| bits[w] & live[w] != 0) {
                    Some(w) => self.residues[p][k] = w,
                    None => {
                        s.remove_index(v, k)?;
                        changed = true;
                    }
                }
            }
            if changed {
                // removed values had no live row, so the live set is unchanged
                s.set_slot(self.size_at + p, s.size(v) as u64);
            }
        }
        Ok(())
    }
}

impl Propagator for CompactTable {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        self.update(s)?;
        self.filter(s)
    }
}

/// Forward checking for large conflicts tables: filters once at most one
/// variable is unfixed.
struct ConflictsFc {
    vars: Vec<VarId>,
    rows: Vec<Vec<Option<i64>>>,
}

impl Propagator for ConflictsFc {
    fn scope(&self) -> Vec<VarId> {
        self.vars.clone()
    }

    fn propagate(&mut self, s: &mut DomainStore) -> Outcome {
        let open: Vec<usize> = (0..self.vars.len())
            .filter(|&p| !s.is_fixed(self.vars[p]))
            .collect();
        if open.len() > 1 {
            return Ok(());
        }
        let free = open.first().copied();
        for row in &self.rows {
            let hit = row.iter().enumerate().all(|(p, c)| {
                Some(p) == free || c.is_none_or(|a| s.value(self.vars[p]) == Some(a))
            });
            if !hit {
                continue;
            }
            match free {
                None => return Err(Conflict),
                Some(p) => match row[p] {
                    None => return Err(Conflict),
                    Some(a) => {
                        s.remove(self.vars[p], a)?;
                    }
                },
            }
        }
        Ok(())
    }
}
