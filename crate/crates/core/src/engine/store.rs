//! Trailed bit-set domains plus reversible integer slots for propagator
//! state.

pub type VarId = usize;

/// A domain wipe-out or a violated constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict;

pub type Prune = Result<bool, Conflict>;

#[derive(Debug, Clone, Copy)]
enum Entry {
    Word { at: u32, old: u64 },
    Meta { var: u32, size: u32, lo: u32, hi: u32 },
    Slot { at: u32, old: u64 },
}

/// Current domains over the initial value lists. Every modification made
/// after `push` is undone by the matching `pop`.
#[derive(Debug, Clone)]
pub struct DomainStore {
    init: Vec<Vec<i64>>,
    offset: Vec<usize>,
    words: Vec<u64>,
    word_stamp: Vec<u32>,
    size: Vec<u32>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    meta_stamp: Vec<u32>,
    slots: Vec<u64>,
    slot_stamp: Vec<u32>,
    trail: Vec<Entry>,
    levels: Vec<usize>,
    epoch: u32,
    changed: Vec<VarId>,
    is_changed: Vec<bool>,
    objective_bound: Option<i64>,
}

fn nwords(n: usize) -> usize {
    n.div_ceil(64)
}

impl DomainStore {
    /// Each inner list must be sorted ascending and duplicate free.
    pub fn new(domains: Vec<Vec<i64>>) -> DomainStore {
        let mut offset = Vec::with_capacity(domains.len() + 1);
        let mut total = 0;
        for d in &domains {
            debug_assert!(d.windows(2).all(|w| w[0] < w[1]));
            offset.push(total);
            total += nwords(d.len());
        }
        offset.push(total);
        let mut words = vec![0u64; total];
        for (v, d) in domains.iter().enumerate() {
            for k in 0..d.len() {
                words[offset[v] + k / 64] |= 1 << (k % 64);
            }
        }
        let n = domains.len();
        DomainStore {
            size: domains.iter().map(|d| d.len() as u32).collect(),
            lo: vec![0; n],
            hi: domains.iter().map(|d| d.len().saturating_sub(1) as u32).collect(),
            meta_stamp: vec![u32::MAX; n],
            word_stamp: vec![u32::MAX; total],
            init: domains,
            offset,
            words,
            slots: Vec::new(),
            slot_stamp: Vec::new(),
            trail: Vec::new(),
            levels: Vec::new(),
            epoch: 0,
            changed: Vec::new(),
            is_changed: vec![false; n],
            objective_bound: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.init.len()
    }

    pub fn initial(&self, v: VarId) -> &[i64] {
        &self.init[v]
    }

    pub fn size(&self, v: VarId) -> usize {
        self.size[v] as usize
    }

    pub fn is_fixed(&self, v: VarId) -> bool {
        self.size[v] == 1
    }

    /// Smallest current value. Meaningless on an empty domain.
    pub fn min(&self, v: VarId) -> i64 {
        self.init[v][self.lo[v] as usize]
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.init[v][self.hi[v] as usize]
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.is_fixed(v).then(|| self.min(v))
    }

    pub fn index_of(&self, v: VarId, value: i64) -> Option<usize> {
        self.init[v].binary_search(&value).ok()
    }

    pub fn has_index(&self, v: VarId, k: usize) -> bool {
        self.words[self.offset[v] + k / 64] >> (k % 64) & 1 == 1
    }

    pub fn contains(&self, v: VarId, value: i64) -> bool {
        self.index_of(v, value).is_some_and(|k| self.has_index(v, k))
    }

    /// Indices into the initial value list of the values still present.
    pub fn indices(&self, v: VarId) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = (self.offset[v], self.offset[v + 1]);
        self.words[a..b].iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                (bits != 0).then(|| {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    w * 64 + t
                })
            })
        })
    }

    pub fn values(&self, v: VarId) -> impl Iterator<Item = i64> + '_ {
        self.indices(v).map(move |k| self.init[v][k])
    }

    pub fn domain(&self, v: VarId) -> Vec<i64> {
        self.values(v).collect()
    }

    /// Every current domain, in variable order.
    pub fn snapshot(&self) -> Vec<Vec<i64>> {
        (0..self.num_vars()).map(|v| self.domain(v)).collect()
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    pub fn push(&mut self) {
        self.levels.push(self.trail.len());
        self.epoch = self.epoch.wrapping_add(1);
    }

    /// Restores the state saved by the matching `push`. No-op at level 0.
    pub fn pop(&mut self) {
        let Some(mark) = self.levels.pop() else {
            return;
        };
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Entry::Word { at, old } => self.words[at as usize] = old,
                Entry::Meta { var, size, lo, hi } => {
                    let v = var as usize;
                    self.size[v] = size;
                    self.lo[v] = lo;
                    self.hi[v] = hi;
                }
                Entry::Slot { at, old } => self.slots[at as usize] = old,
            }
        }
        self.epoch = self.epoch.wrapping_add(1);
        self.clear_changed();
    }

    pub fn pop_to(&mut self, level: usize) {
        while self.level() > level {
            self.pop();
        }
    }

    /// Variables modified since the last call.
    pub fn take_changed(&mut self) -> Vec<VarId> {
        for &v in &self.changed {
            self.is_changed[v] = false;
        }
        std::mem::take(&mut self.changed)
    }

    pub fn clear_changed(&mut self) {
        self.take_changed();
    }

    /// Bound set by branch-and-bound; not trailed.
    pub fn objective_bound(&self) -> Option<i64> {
        self.objective_bound
    }

    pub fn set_objective_bound(&mut self, bound: Option<i64>) {
        self.objective_bound = bound;
    }

    pub fn alloc_slots(&mut self, n: usize, init: u64) -> usize {
        let at = self.slots.len();
        self.slots.resize(at + n, init);
        self.slot_stamp.resize(at + n, u32::MAX);
        at
    }

    pub fn slot(&self, at: usize) -> u64 {
        self.slots[at]
    }

    pub fn set_slot(&mut self, at: usize, value: u64) {
        if self.slots[at] == value {
            return;
        }
        if !self.levels.is_empty() && self.slot_stamp[at] != self.epoch {
            self.slot_stamp[at] = self.epoch;
            self.trail.push(Entry::Slot {
                at: at as u32,
                old: self.slots[at],
            });
        }
        self.slots[at] = value;
    }

    pub fn slots(&self, at: usize, n: usize) -> &[u64] {
        &self.slots[at..at + n]
    }

    fn save_meta(&mut self, v: VarId) {
        if !self.levels.is_empty() && self.meta_stamp[v] != self.epoch {
            self.meta_stamp[v] = self.epoch;
            self.trail.push(Entry::Meta {
                var: v as u32,
                size: self.size[v],
                lo: self.lo[v],
                hi: self.hi[v],
            });
        }
        if !self.is_changed[v] {
            self.is_changed[v] = true;
            self.changed.push(v);
        }
    }

    fn write_word(&mut self, at: usize, new: u64) {
        if !self.levels.is_empty() && self.word_stamp[at] != self.epoch {
            self.word_stamp[at] = self.epoch;
            self.trail.push(Entry::Word {
                at: at as u32,
                old: self.words[at],
            });
        }
        self.words[at] = new;
    }

    /// Recomputes the min/max caches after removals.
    fn finish(&mut self, v: VarId, removed: u32) -> Prune {
        self.size[v] -= removed;
        if self.size[v] == 0 {
            return Err(Conflict);
        }
        let (mut lo, mut hi) = (self.lo[v] as usize, self.hi[v] as usize);
        while !self.has_index(v, lo) {
            lo += 1;
        }
        while !self.has_index(v, hi) {
            hi -= 1;
        }
        self.lo[v] = lo as u32;
        self.hi[v] = hi as u32;
        Ok(true)
    }

    /// Clears the bits of `mask` in word `w` of `v`; returns how many were set.
    fn clear_bits(&mut self, v: VarId, w: usize, mask: u64) -> u32 {
        let at = self.offset[v] + w;
        let hit = self.words[at] & mask;
        if hit == 0 {
            return 0;
        }
        self.write_word(at, self.words[at] & !mask);
        hit.count_ones()
    }

    pub fn remove_index(&mut self, v: VarId, k: usize) -> Prune {
        if self.size[v] == 0 {
            return Err(Conflict);
        }
        if !self.has_index(v, k) {
            return Ok(false);
        }
        self.save_meta(v);
        let removed = self.clear_bits(v, k / 64, 1 << (k % 64));
        self.finish(v, removed)
    }

    pub fn remove(&mut self, v: VarId, value: i64) -> Prune {
        match self.index_of(v, value) {
            Some(k) => self.remove_index(v, k),
            None => Ok(false),
        }
    }

    /// Removes every index in `lo..hi`.
    fn remove_index_range(&mut self, v: VarId, lo: usize, hi: usize) -> Prune {
        if self.size[v] == 0 {
            return Err(Conflict);
        }
        if lo >= hi {
            return Ok(false);
        }
        let meta = (self.size[v], self.lo[v], self.hi[v]);
        let mut removed = 0;
        let mut saved = false;
        for w in lo / 64..=(hi - 1) / 64 {
            let a = if w == lo / 64 { lo % 64 } else { 0 };
            let b = if w == (hi - 1) / 64 { (hi - 1) % 64 + 1 } else { 64 };
            let mask = if b - a == 64 { u64::MAX } else { ((1u64 << (b - a)) - 1) << a };
            if self.words[self.offset[v] + w] & mask != 0 && !saved {
                self.save_meta(v);
                saved = true;
            }
            removed += self.clear_bits(v, w, mask);
        }
        if removed == 0 {
            debug_assert_eq!(meta, (self.size[v], self.lo[v], self.hi[v]));
            return Ok(false);
        }
        self.finish(v, removed)
    }

    /// Removes every value below `bound`.
    pub fn set_min(&mut self, v: VarId, bound: i64) -> Prune {
        if self.size[v] == 0 {
            return Err(Conflict);
        }
        if bound <= self.min(v) {
            return Ok(false);
        }
        let cut = self.init[v].partition_point(|&x| x < bound);
        self.remove_index_range(v, self.lo[v] as usize, cut)
    }

    /// Removes every value above `bound`.
    pub fn set_max(&mut self, v: VarId, bound: i64) -> Prune {
        if self.size[v] == 0 {
            return Err(Conflict);
        }
        if bound >= self.max(v) {
            return Ok(false);
        }
        let cut = self.init[v].partition_point(|&x| x <= bound);
        self.remove_index_range(v, cut, self.hi[v] as usize + 1)
    }

    pub fn set_min_i128(&mut self, v: VarId, bound: i128) -> Prune {
        if bound > i64::MAX as i128 {
            return self.remove_all(v);
        }
        self.set_min(v, bound.max(i64::MIN as i128) as i64)
    }

    pub fn set_max_i128(&mut self, v: VarId, bound: i128) -> Prune {
        if bound < i64::MIN as i128 {
            return self.remove_all(v);
        }
        self.set_max(v, bound.min(i64::MAX as i128) as i64)
    }

    fn remove_all(&mut self, v: VarId) -> Prune {
        let n = self.init[v].len();
        self.remove_index_range(v, 0, n)?;
        Err(Conflict)
    }

    pub fn assign(&mut self, v: VarId, value: i64) -> Prune {
        match self.index_of(v, value) {
            Some(k) if self.has_index(v, k) => {
                if self.size[v] == 1 {
                    return Ok(false);
                }
                let n = self.init[v].len();
                let lo = self.lo[v] as usize;
                let hi = self.hi[v] as usize + 1;
                self.remove_index_range(v, lo, k)?;
                self.remove_index_range(v, k + 1, hi.min(n))?;
                Ok(true)
            }
            _ => self.remove_all(v),
        }
    }

    /// Keeps only the values for which `keep` holds.
    pub fn retain(&mut self, v: VarId, mut keep: impl FnMut(i64) -> bool) -> Prune {
        if self.size[v] == 0 {
            return Err(Conflict);
        }
        let mut removed = 0;
        let mut saved = false;
        for w in 0..nwords(self.init[v].len()) {
            let bits = self.words[self.offset[v] + w];
            let mut drop = 0u64;
            let mut rest = bits;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if !keep(self.init[v][w * 64 + t]) {
                    drop |= 1 << t;
                }
            }
            if drop != 0 {
                if !saved {
                    self.save_meta(v);
                    saved = true;
                }
                removed += self.clear_bits(v, w, drop);
            }
        }
        if removed == 0 {
            return Ok(false);
        }
        self.finish(v, removed)
    }

    /// Keeps only the initial-value indices for which `keep` holds.
    pub fn retain_indices(&mut self, v: VarId, keep: impl Fn(usize) -> bool) -> Prune {
        let vals: Vec<usize> = self.indices(v).filter(|&k| !keep(k)).collect();
        let mut changed = false;
        for k in vals {
            changed |= self.remove_index(v, k)?;
        }
        Ok(changed)
    }
}
