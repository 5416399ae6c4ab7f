//! Functional prefix syntax for intension predicates, e.g. `eq(add(x,y),z)`.

use crate::model::{Expr, Op};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrefixError {
    /// Malformed text; the offset is a byte position in the input.
    Syntax { offset: usize, message: String },
    /// A well-formed call to an operator outside the supported set.
    UnknownOperator(String),
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'[' | b']' | b'%')
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PrefixError> {
        Err(PrefixError::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, PrefixError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'-' | b'+' | b'0'..=b'9') => {
                self.pos += 1;
                while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                let lit = &self.text[start..self.pos];
                match lit.parse::<i64>() {
                    Ok(v) => Ok(Expr::Const(v)),
                    Err(_) => {
                        self.pos = start;
                        self.err(format!("invalid integer `{lit}`"))
                    }
                }
            }
            Some(b) if is_ident_byte(b) => {
                while self.peek().is_some_and(is_ident_byte) {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                self.skip_ws();
                if self.peek() != Some(b'(') {
                    return Ok(Expr::Var(name.to_string()));
                }
                self.pos += 1;
                let mut children = Vec::new();
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                } else {
                    loop {
                        children.push(self.expr()?);
                        self.skip_ws();
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return self.err("expected `,` or `)`"),
                        }
                    }
                }
                let op = Op::from_name(name)
                    .ok_or_else(|| PrefixError::UnknownOperator(name.to_string()))?;
                if !op.arity().accepts(children.len()) {
                    self.pos = start;
                    return self.err(format!("`{name}` applied to {} operands", children.len()));
                }
                Ok(Expr::Op(op, children))
            }
            Some(b) => self.err(format!("unexpected `{}`", b as char)),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses one expression; trailing text other than whitespace is an error.
pub fn parse_expr(text: &str) -> Result<Expr, PrefixError> {
    let mut p = Parser { text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("trailing characters after expression");
    }
    Ok(e)
}
