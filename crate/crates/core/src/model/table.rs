use std::fmt;

use thiserror::Error;

/// One entry of a table row. `Star` matches any value and orders before
/// every integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Star,
    Value(i64),
}

impl Cell {
    pub fn matches(self, v: i64) -> bool {
        match self {
            Cell::Star => true,
            Cell::Value(x) => x == v,
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Value(v)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Star => f.write_str("*"),
            Cell::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Supports,
    Conflicts,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("table arity must be positive")]
    ZeroArity,
    #[error("row {row} has {found} entries, expected {arity}")]
    RowLength {
        row: usize,
        arity: usize,
        found: usize,
    },
}

/// A list of tuples; rows are kept sorted and unique so that equal tables
/// compare equal and serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    arity: usize,
    polarity: Polarity,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(
        arity: usize,
        polarity: Polarity,
        rows: impl IntoIterator<Item = Vec<Cell>>,
    ) -> Result<Table, TableError> {
        if arity == 0 {
            return Err(TableError::ZeroArity);
        }
        let mut rows: Vec<Vec<Cell>> = rows.into_iter().collect();
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != arity) {
            return Err(TableError::RowLength {
                row,
                arity,
                found: r.len(),
            });
        }
        rows.sort_unstable();
        rows.dedup();
        Ok(Table {
            arity,
            polarity,
            rows,
        })
    }

    /// Star-free table from integer rows.
    pub fn from_values(
        arity: usize,
        polarity: Polarity,
        rows: impl IntoIterator<Item = Vec<i64>>,
    ) -> Result<Table, TableError> {
        Table::new(
            arity,
            polarity,
            rows.into_iter()
                .map(|r| r.into_iter().map(Cell::Value).collect()),
        )
    }

    pub fn supports(arity: usize, rows: impl IntoIterator<Item = Vec<i64>>) -> Table {
        Table::from_values(arity, Polarity::Supports, rows).expect("well-formed table rows")
    }

    pub fn conflicts(arity: usize, rows: impl IntoIterator<Item = Vec<i64>>) -> Table {
        Table::from_values(arity, Polarity::Conflicts, rows).expect("well-formed table rows")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn has_star(&self) -> bool {
        self.rows.iter().flatten().any(|c| *c == Cell::Star)
    }

    pub fn matches_some_row(&self, tuple: &[i64]) -> bool {
        self.rows.iter().any(|row| {
            row.len() == tuple.len() && row.iter().zip(tuple).all(|(c, &v)| c.matches(v))
        })
    }

    /// Whether `tuple` is allowed by this table.
    pub fn accepts(&self, tuple: &[i64]) -> bool {
        let hit = self.matches_some_row(tuple);
        match self.polarity {
            Polarity::Supports => hit,
            Polarity::Conflicts => !hit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_rows_match_anything() {
        let t = Table::new(
            2,
            Polarity::Supports,
            vec![vec![Cell::Value(1), Cell::Star], vec![0.into(), 3.into()]],
        )
        .unwrap();
        assert!(t.accepts(&[1, 9]));
        assert!(t.accepts(&[0, 3]));
        assert!(!t.accepts(&[0, 9]));
    }

    #[test]
    fn rows_normalized() {
        let t = Table::supports(2, vec![vec![1, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(t.rows().len(), 2);
        assert_eq!(t.rows()[0], vec![Cell::Value(0), Cell::Value(1)]);
    }

    #[test]
    fn bad_row_length() {
        let err = Table::from_values(2, Polarity::Supports, vec![vec![1, 2, 3]]).unwrap_err();
        assert_eq!(
            err,
            TableError::RowLength {
                row: 0,
                arity: 2,
                found: 3
            }
        );
    }
}
