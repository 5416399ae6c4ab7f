use std::fmt;

/// A finite set of integers, kept strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Domain {
    values: Vec<i64>,
}

impl Domain {
    pub fn new(values: impl IntoIterator<Item = i64>) -> Self {
        let mut values: Vec<i64> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        Domain { values }
    }

    /// Inclusive integer range `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        Domain {
            values: (lo..=hi).collect(),
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, value: i64) -> bool {
        self.values.binary_search(&value).is_ok()
    }

    pub fn min(&self) -> Option<i64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.values.last().copied()
    }

    /// Maximal runs of consecutive integers, as inclusive `(lo, hi)` pairs.
    pub fn runs(&self) -> Vec<(i64, i64)> {
        let mut runs: Vec<(i64, i64)> = Vec::new();
        for &v in &self.values {
            match runs.last_mut() {
                Some((_, hi)) if *hi + 1 == v => *hi = v,
                _ => runs.push((v, v)),
            }
        }
        runs
    }
}

impl fmt::Display for Domain {
    /// Space separated values, with every run of two or more consecutive
    /// integers written as `a..b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        Ok(())
    }
}

impl FromIterator<i64> for Domain {
    fn from_iter<T: IntoIterator<Item = i64>>(iter: T) -> Self {
        Domain::new(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_dedups() {
        let d = Domain::new([3, 1, 2, 3, -1]);
        assert_eq!(d.values(), &[-1, 1, 2, 3]);
        assert!(d.contains(2));
        assert!(!d.contains(0));
    }

    #[test]
    fn run_compression() {
        assert_eq!(Domain::new([0, 1, 2, 3, 7]).to_string(), "0..3 7");
        assert_eq!(Domain::new([-1, 1]).to_string(), "-1 1");
        assert_eq!(Domain::new([5]).to_string(), "5");
        assert_eq!(Domain::range(0, 1).to_string(), "0..1");
    }
}
