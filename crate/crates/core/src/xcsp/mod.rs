//! Reading and writing the supported XCSP3 subset.
//!
//! Arrays are flattened to scalar variables named `x[i][j]` on input; the
//! writer regroups them into `<array>` elements when a full rectangular
//! block is declared consecutively. `<group>` and `<block>` wrappers are
//! flattened; `<slide>` is kept as a [`Slide`](crate::model::Slide).

mod parse;
mod prefix;
mod solution;
mod write;

use std::fmt;

use thiserror::Error;

use crate::model::ValidationReport;

pub use parse::parse_instance;
pub use prefix::{parse_expr, PrefixError};
pub use solution::{parse_solution, parse_solution_for, write_solution};
pub use write::write_instance;

/// 1-based position in a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceLocation {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XcspError {
    #[error("syntax error at {location}: {message}")]
    XmlSyntax {
        location: SourceLocation,
        message: String,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("invalid instance: {0}")]
    InvariantViolation(ValidationReport),
    #[error("{list} variables but {values} values")]
    LengthMismatch { list: usize, values: usize },
}
