use std::collections::HashMap;
use std::sync::Arc;

use roxmltree::{Document, Node};

use super::prefix::{parse_expr, PrefixError};
use super::{SourceLocation, XcspError};
use crate::model::{
    validate_instance, Automaton, Cell, Condition, Constraint, Domain, Expr, Instance, Kind,
    Objective, ObjectiveTarget, Occurs, Operand, OrderOp, Polarity, Relation, Sense, Slide,
    Table, Variable,
};

type Result<T> = std::result::Result<T, XcspError>;

fn unsupported<T>(what: impl Into<String>) -> Result<T> {
    Err(XcspError::UnsupportedFeature(what.into()))
}

/// One bracket of an index pattern: `[]`, `[k]` or `[a..b]`.
#[derive(Debug, Clone, Copy)]
enum IndexPat {
    Any,
    Range(usize, usize),
}

impl IndexPat {
    fn matches(self, i: usize) -> bool {
        match self {
            IndexPat::Any => true,
            IndexPat::Range(a, b) => a <= i && i <= b,
        }
    }
}

/// Substitution value for a `%i` placeholder inside a group template.
#[derive(Debug, Clone)]
enum Arg {
    Var(String),
    Const(i64),
}

struct Ctx<'a, 'input> {
    doc: &'a Document<'input>,
    variables: Vec<Variable>,
    known: HashMap<String, usize>,
    /// Array stem to its declared cells, in row-major order.
    arrays: HashMap<String, Vec<(Vec<usize>, String)>>,
    /// Placeholders are accepted while reading group and slide templates.
    in_template: bool,
}

fn elements<'a, 'input>(node: Node<'a, 'input>) -> impl Iterator<Item = Node<'a, 'input>> {
    node.children().filter(Node::is_element)
}

fn name<'a>(node: Node<'a, '_>) -> &'a str {
    node.tag_name().name()
}

fn parse_int(tok: &str) -> Option<i64> {
    let t = tok.strip_prefix('+').unwrap_or(tok);
    t.parse().ok()
}

/// `a..b` as an inclusive pair.
fn parse_range(tok: &str) -> Option<(i64, i64)> {
    let (a, b) = tok.split_once("..")?;
    Some((parse_int(a)?, parse_int(b)?))
}

fn is_placeholder(tok: &str) -> bool {
    tok.strip_prefix('%')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

impl<'a, 'input> Ctx<'a, 'input> {
    fn location(&self, node: Node) -> SourceLocation {
        let pos = self.doc.text_pos_at(node.range().start);
        SourceLocation {
            line: pos.row,
            column: pos.col,
        }
    }

    fn syntax<T>(&self, node: Node, message: impl Into<String>) -> Result<T> {
        Err(XcspError::XmlSyntax {
            location: self.location(node),
            message: message.into(),
        })
    }

    /// Concatenated text content; element children are rejected.
    fn text(&self, node: Node<'a, 'input>) -> Result<String> {
        let mut out = String::new();
        for c in node.children() {
            if c.is_element() {
                return unsupported(format!("<{}> inside <{}>", name(c), name(node)));
            }
            if let Some(t) = c.text() {
                out.push_str(t);
            }
        }
        Ok(out)
    }

    fn child(&self, node: Node<'a, 'input>, tag: &str) -> Option<Node<'a, 'input>> {
        elements(node).find(|c| name(*c) == tag)
    }

    fn required(&self, node: Node<'a, 'input>, tag: &str) -> Result<Node<'a, 'input>> {
        self.child(node, tag).map_or_else(
            || self.syntax(node, format!("<{}> requires a <{tag}> child", name(node))),
            Ok,
        )
    }

    /// Rejects children outside `allowed`.
    fn only(&self, node: Node<'a, 'input>, allowed: &[&str]) -> Result<()> {
        match elements(node).find(|c| !allowed.contains(&name(*c))) {
            Some(c) => unsupported(format!("<{}> inside <{}>", name(c), name(node))),
            None => Ok(()),
        }
    }

    fn ints(&self, node: Node<'a, 'input>) -> Result<Vec<i64>> {
        let text = self.text(node)?;
        text.split_whitespace()
            .map(|t| match parse_int(t) {
                Some(v) => Ok(v),
                None if t == "*" => unsupported("`*` in an integer list"),
                None => self.syntax(node, format!("expected an integer, found `{t}`")),
            })
            .collect()
    }

    fn domain(&self, node: Node<'a, 'input>, text: &str) -> Result<Domain> {
        let mut values = Vec::new();
        for t in text.split_whitespace() {
            if let Some(v) = parse_int(t) {
                values.push(v);
            } else if let Some((a, b)) = parse_range(t) {
                if b.saturating_sub(a) > 10_000_000 {
                    return unsupported(format!("domain range `{t}` is too large"));
                }
                values.extend(a..=b);
            } else if t.contains("infinity") {
                return unsupported("infinite domain bound");
            } else {
                return self.syntax(node, format!("invalid domain token `{t}`"));
            }
        }
        Ok(Domain::new(values))
    }

    fn declare(&mut self, node: Node, id: String, domain: Domain) -> Result<()> {
        if self.known.contains_key(&id) {
            return self.syntax(node, format!("variable `{id}` declared twice"));
        }
        self.known.insert(id.clone(), self.variables.len());
        self.variables.push(Variable::new(id, domain));
        Ok(())
    }

    fn check_var_type(&self, node: Node) -> Result<()> {
        if let Some(t) = node.attribute("type") {
            if t != "integer" {
                return unsupported(format!("variable type `{t}`"));
            }
        }
        if node.attribute("as").is_some() {
            return unsupported("variable aliasing with `as`");
        }
        Ok(())
    }

    fn variables(&mut self, node: Node<'a, 'input>) -> Result<()> {
        for v in elements(node) {
            self.check_var_type(v)?;
            let Some(id) = v.attribute("id") else {
                return self.syntax(v, "missing `id` attribute");
            };
            match name(v) {
                "var" => {
                    let text = self.text(v)?;
                    let d = self.domain(v, &text)?;
                    self.declare(v, id.to_string(), d)?;
                }
                "array" => self.array(v, id)?,
                other => return unsupported(format!("<{other}> in <variables>")),
            }
        }
        Ok(())
    }

    fn shape(&self, node: Node, size: &str) -> Result<Vec<usize>> {
        let mut dims = Vec::new();
        let mut rest = size.trim();
        while !rest.is_empty() {
            let Some(close) = rest.find(']') else {
                return self.syntax(node, format!("malformed size `{size}`"));
            };
            match rest[..close].strip_prefix('[').and_then(|d| d.trim().parse().ok()) {
                Some(d) => dims.push(d),
                None => return self.syntax(node, format!("malformed size `{size}`")),
            }
            rest = rest[close + 1..].trim_start();
        }
        if dims.is_empty() {
            return self.syntax(node, "array without dimensions");
        }
        if dims.iter().product::<usize>() > 10_000_000 {
            return unsupported("array too large");
        }
        Ok(dims)
    }

    fn array(&mut self, node: Node<'a, 'input>, id: &str) -> Result<()> {
        let Some(size) = node.attribute("size") else {
            return self.syntax(node, "array without `size`");
        };
        let dims = self.shape(node, size)?;
        let mut all = vec![Vec::new()];
        for &d in &dims {
            all = all
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..d).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        let mut domains: Vec<Option<Domain>> = vec![None; all.len()];
        let blocks: Vec<Node> = elements(node).collect();
        if blocks.is_empty() {
            let text = self.text(node)?;
            let d = self.domain(node, &text)?;
            domains.iter_mut().for_each(|slot| *slot = Some(d.clone()));
        } else {
            for b in blocks {
                if name(b) != "domain" {
                    return unsupported(format!("<{}> in <array>", name(b)));
                }
                let Some(targets) = b.attribute("for") else {
                    return self.syntax(b, "<domain> without `for`");
                };
                let text = self.text(b)?;
                let d = self.domain(b, &text)?;
                for tok in targets.split_whitespace() {
                    if tok == "others" {
                        for slot in domains.iter_mut().filter(|s| s.is_none()) {
                            *slot = Some(d.clone());
                        }
                        continue;
                    }
                    let (stem, pats) = self.pattern(b, tok)?;
                    if stem != id || pats.len() != dims.len() {
                        return self.syntax(b, format!("`{tok}` does not address array `{id}`"));
                    }
                    for (k, idx) in all.iter().enumerate() {
                        if idx.iter().zip(&pats).all(|(&i, p)| p.matches(i)) {
                            domains[k] = Some(d.clone());
                        }
                    }
                }
            }
        }
        let mut cells = Vec::new();
        for (idx, d) in all.into_iter().zip(domains) {
            if let Some(d) = d {
                let cell_id = format!(
                    "{id}{}",
                    idx.iter().map(|i| format!("[{i}]")).collect::<String>()
                );
                self.declare(node, cell_id.clone(), d)?;
                cells.push((idx, cell_id));
            }
        }
        self.arrays.insert(id.to_string(), cells);
        Ok(())
    }

    /// Splits `x[2][]` or `x[0..3]` into its stem and index patterns.
    fn pattern(&self, node: Node, tok: &str) -> Result<(String, Vec<IndexPat>)> {
        let Some(open) = tok.find('[') else {
            return Ok((tok.to_string(), Vec::new()));
        };
        let stem = &tok[..open];
        let mut rest = &tok[open..];
        let mut pats = Vec::new();
        while !rest.is_empty() {
            let close = match (rest.starts_with('['), rest.find(']')) {
                (true, Some(c)) => c,
                _ => return self.syntax(node, format!("malformed variable reference `{tok}`")),
            };
            let inner = &rest[1..close];
            let pat = if inner.is_empty() || inner == "*" {
                IndexPat::Any
            } else if let Ok(k) = inner.parse::<usize>() {
                IndexPat::Range(k, k)
            } else if let Some((a, b)) = inner
                .split_once("..")
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            {
                IndexPat::Range(a, b)
            } else {
                return self.syntax(node, format!("malformed index in `{tok}`"));
            };
            pats.push(pat);
            rest = &rest[close + 1..];
        }
        Ok((stem.to_string(), pats))
    }

    /// Expands one list token into variable identifiers.
    fn expand(&self, node: Node, tok: &str, out: &mut Vec<String>) -> Result<()> {
        if self.known.contains_key(tok) {
            out.push(tok.to_string());
            return Ok(());
        }
        if is_placeholder(tok) && self.in_template {
            out.push(tok.to_string());
            return Ok(());
        }
        if tok.starts_with('%') {
            return unsupported(format!("placeholder `{tok}`"));
        }
        let compact = tok.contains("[]") || tok.contains("..") || tok.contains("[*]");
        if compact {
            let (stem, pats) = self.pattern(node, tok)?;
            if let Some(cells) = self.arrays.get(&stem) {
                out.extend(
                    cells
                        .iter()
                        .filter(|(idx, _)| {
                            idx.len() == pats.len()
                                && idx.iter().zip(&pats).all(|(&i, p)| p.matches(i))
                        })
                        .map(|(_, id)| id.clone()),
                );
                return Ok(());
            }
        }
        Err(XcspError::UnknownVariable(tok.to_string()))
    }

    fn list_text(&self, node: Node, text: &str) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            self.expand(node, tok, &mut out)?;
        }
        Ok(out)
    }

    fn list(&self, node: Node<'a, 'input>) -> Result<Vec<String>> {
        if let Some(s) = node.attribute("startIndex") {
            if s.trim() != "0" {
                return unsupported("non-zero startIndex");
            }
        }
        let text = self.text(node)?;
        self.list_text(node, &text)
    }

    fn operand(&self, node: Node, tok: &str) -> Result<Operand> {
        if let Some(v) = parse_int(tok) {
            return Ok(Operand::Const(v));
        }
        let mut ids = Vec::new();
        self.expand(node, tok, &mut ids)?;
        match ids.len() {
            1 => Ok(Operand::Var(ids.pop().unwrap())),
            _ => self.syntax(node, format!("`{tok}` must denote a single variable")),
        }
    }

    fn operands(&self, node: Node<'a, 'input>) -> Result<Vec<Operand>> {
        let text = self.text(node)?;
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if let Some(v) = parse_int(tok) {
                out.push(Operand::Const(v));
            } else {
                let mut ids = Vec::new();
                self.expand(node, tok, &mut ids)?;
                out.extend(ids.into_iter().map(Operand::Var));
            }
        }
        Ok(out)
    }

    /// Tuple syntax `(a,b)(c,d)`; entries are trimmed tokens.
    fn tuples(&self, node: Node, text: &str) -> Result<Vec<Vec<String>>> {
        let mut out = Vec::new();
        let mut rest = text.trim_start();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return self.syntax(node, "expected `(` to open a tuple");
            }
            let Some(close) = rest.find(')') else {
                return self.syntax(node, "unterminated tuple");
            };
            let body = &rest[1..close];
            let row: Vec<String> = if body.trim().is_empty() {
                Vec::new()
            } else {
                body.split(',').map(|t| t.trim().to_string()).collect()
            };
            if row.iter().any(String::is_empty) {
                return self.syntax(node, "empty tuple entry");
            }
            out.push(row);
            rest = rest[close + 1..].trim_start();
        }
        Ok(out)
    }

    fn condition(&self, node: Node<'a, 'input>) -> Result<Condition> {
        let text = self.text(node)?;
        let rows = self.tuples(node, &text)?;
        let [row] = &rows[..] else {
            return self.syntax(node, "condition must be a single `(op,rhs)` pair");
        };
        let [op, rhs] = &row[..] else {
            return self.syntax(node, "condition must be a single `(op,rhs)` pair");
        };
        if op == "in" {
            if let Some((a, b)) = parse_range(rhs) {
                return Ok(Condition::In(a, b));
            }
            return unsupported(format!("`in` condition with `{rhs}`"));
        }
        match Relation::from_name(op) {
            Some(rel) => Ok(Condition::Cmp(rel, self.operand(node, rhs)?)),
            None if op == "notin" => unsupported("`notin` condition"),
            None => self.syntax(node, format!("unknown condition operator `{op}`")),
        }
    }

    fn operator(&self, node: Node<'a, 'input>) -> Result<OrderOp> {
        let op = self.required(node, "operator")?;
        let text = self.text(op)?;
        OrderOp::from_name(text.trim()).map_or_else(
            || self.syntax(op, format!("unknown operator `{}`", text.trim())),
            Ok,
        )
    }

    fn matrix(&self, node: Node<'a, 'input>) -> Result<Vec<Vec<String>>> {
        let text = self.text(node)?;
        if text.trim_start().starts_with('(') {
            return self
                .tuples(node, &text)?
                .iter()
                .map(|row| {
                    let mut out = Vec::new();
                    for tok in row {
                        self.expand(node, tok, &mut out)?;
                    }
                    Ok(out)
                })
                .collect();
        }
        // compact `x[][]` form over a two-dimensional array
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let [tok] = tokens[..] else {
            return self.syntax(node, "matrix must be tuples or a single array reference");
        };
        let (stem, pats) = self.pattern(node, tok)?;
        let Some(cells) = self.arrays.get(&stem).filter(|_| pats.len() == 2) else {
            return Err(XcspError::UnknownVariable(tok.to_string()));
        };
        let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
        for (idx, id) in cells {
            if idx.len() == 2 && pats[0].matches(idx[0]) && pats[1].matches(idx[1]) {
                match rows.last_mut() {
                    Some((r, row)) if *r == idx[0] => row.push(id.clone()),
                    _ => rows.push((idx[0], vec![id.clone()])),
                }
            }
        }
        Ok(rows.into_iter().map(|(_, r)| r).collect())
    }

    fn table(&self, node: Node<'a, 'input>, arity: usize) -> Result<Table> {
        let (polarity, body) = match (self.child(node, "supports"), self.child(node, "conflicts")) {
            (Some(b), None) => (Polarity::Supports, b),
            (None, Some(b)) => (Polarity::Conflicts, b),
            _ => return self.syntax(node, "<extension> needs exactly one of <supports>/<conflicts>"),
        };
        if body.attribute("as").is_some() {
            return unsupported("table reuse with `as`");
        }
        let text = self.text(body)?;
        let cell = |tok: &str| -> Result<Cell> {
            if tok == "*" {
                Ok(Cell::Star)
            } else {
                parse_int(tok).map(Cell::Value).map_or_else(
                    || {
                        if tok.starts_with('{') || tok.starts_with('!') || tok.contains("..") {
                            unsupported(format!("smart table entry `{tok}`"))
                        } else {
                            self.syntax(body, format!("invalid table entry `{tok}`"))
                        }
                    },
                    Ok,
                )
            }
        };
        let mut rows = Vec::new();
        if arity == 1 && !text.trim_start().starts_with('(') {
            for tok in text.split_whitespace() {
                if let Some((a, b)) = parse_range(tok) {
                    rows.extend((a..=b).map(|v| vec![Cell::Value(v)]));
                } else {
                    rows.push(vec![cell(tok)?]);
                }
            }
        } else {
            for row in self.tuples(body, &text)? {
                if row.len() != arity {
                    return self.syntax(
                        body,
                        format!("tuple of length {} in a table of arity {arity}", row.len()),
                    );
                }
                rows.push(row.iter().map(|t| cell(t)).collect::<Result<Vec<_>>>()?);
            }
        }
        Table::new(arity.max(1), polarity, rows).map_or_else(|e| self.syntax(body, e.to_string()), Ok)
    }

    fn intension(&self, node: Node<'a, 'input>) -> Result<Expr> {
        if let Some(f) = self.child(node, "function") {
            let _ = f;
            return unsupported("<function> inside <intension>");
        }
        let text = self.text(node)?;
        match parse_expr(&text) {
            Ok(e) => {
                for id in e.variables() {
                    let mut ids = Vec::new();
                    self.expand(node, id, &mut ids)?;
                    if ids.len() != 1 || ids[0] != id {
                        return Err(XcspError::UnknownVariable(id.to_string()));
                    }
                }
                Ok(e)
            }
            Err(PrefixError::UnknownOperator(op)) => unsupported(format!("intension operator `{op}`")),
            Err(PrefixError::Syntax { message, .. }) => {
                if text.chars().any(|c| "=<>+*&|!/".contains(c)) {
                    unsupported("infix intension syntax")
                } else {
                    self.syntax(node, message)
                }
            }
        }
    }

    fn constraint(&mut self, node: Node<'a, 'input>, out: &mut Vec<Constraint>) -> Result<()> {
        let c = match name(node) {
            "group" => return self.group(node, out),
            "block" => {
                for c in elements(node) {
                    self.constraint(c, out)?;
                }
                return Ok(());
            }
            "intension" => Constraint::Intension(self.intension(node)?),
            "extension" => {
                self.only(node, &["list", "supports", "conflicts"])?;
                let scope = self.list(self.required(node, "list")?)?;
                let table = self.table(node, scope.len())?;
                Constraint::Extension {
                    scope,
                    table: Arc::new(table),
                }
            }
            "regular" => {
                self.only(node, &["list", "transitions", "start", "final"])?;
                let scope = self.list(self.required(node, "list")?)?;
                let tnode = self.required(node, "transitions")?;
                let text = self.text(tnode)?;
                let mut transitions = Vec::new();
                for row in self.tuples(tnode, &text)? {
                    let [from, sym, to] = &row[..] else {
                        return self.syntax(tnode, "transition must be `(from,symbol,to)`");
                    };
                    let Some(sym) = parse_int(sym) else {
                        return self.syntax(tnode, format!("invalid symbol `{sym}`"));
                    };
                    transitions.push((from.clone(), sym, to.clone()));
                }
                let start = self.text(self.required(node, "start")?)?;
                let finals = self.text(self.required(node, "final")?)?;
                Constraint::Regular {
                    scope,
                    automaton: Automaton::new(
                        start.trim(),
                        transitions,
                        finals.split_whitespace().map(String::from),
                    ),
                }
            }
            "allDifferent" => {
                self.only(node, &["list", "matrix"])?;
                if let Some(m) = self.child(node, "matrix") {
                    Constraint::AllDifferentMatrix(self.matrix(m)?)
                } else if elements(node).count() > 1 {
                    return unsupported("allDifferent over several lists");
                } else if let Some(l) = self.child(node, "list") {
                    Constraint::AllDifferent(self.list(l)?)
                } else {
                    Constraint::AllDifferent(self.list(node)?)
                }
            }
            "ordered" => {
                self.only(node, &["list", "operator"])?;
                Constraint::Ordered {
                    scope: self.list(self.required(node, "list")?)?,
                    op: self.operator(node)?,
                }
            }
            "lex" => {
                self.only(node, &["list", "matrix", "operator"])?;
                let op = self.operator(node)?;
                if let Some(m) = self.child(node, "matrix") {
                    Constraint::LexMatrix {
                        matrix: self.matrix(m)?,
                        op,
                    }
                } else {
                    let lists = elements(node)
                        .filter(|c| name(*c) == "list")
                        .map(|l| self.list(l))
                        .collect::<Result<Vec<_>>>()?;
                    Constraint::Lex { lists, op }
                }
            }
            "sum" => {
                self.only(node, &["list", "coeffs", "condition"])?;
                let scope = self.list(self.required(node, "list")?)?;
                let coeffs = match self.child(node, "coeffs") {
                    Some(c) => self.operands(c)?,
                    None => vec![Operand::Const(1); scope.len()],
                };
                Constraint::Sum {
                    scope,
                    coeffs,
                    condition: self.condition(self.required(node, "condition")?)?,
                }
            }
            "count" => {
                self.only(node, &["list", "values", "condition"])?;
                Constraint::Count {
                    scope: self.list(self.required(node, "list")?)?,
                    values: self.ints(self.required(node, "values")?)?,
                    condition: self.condition(self.required(node, "condition")?)?,
                }
            }
            "cardinality" => {
                self.only(node, &["list", "values", "occurs"])?;
                let vnode = self.required(node, "values")?;
                let closed = match vnode.attribute("closed") {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(other) => return self.syntax(vnode, format!("closed=\"{other}\"")),
                };
                let onode = self.required(node, "occurs")?;
                let mut occurs = Vec::new();
                for tok in self.text(onode)?.split_whitespace() {
                    if let Some(k) = parse_int(tok) {
                        occurs.push(Occurs::Exact(k));
                    } else if let Some((a, b)) = parse_range(tok) {
                        occurs.push(Occurs::Between(a, b));
                    } else {
                        return unsupported(format!("occurs entry `{tok}`"));
                    }
                }
                Constraint::Cardinality {
                    scope: self.list(self.required(node, "list")?)?,
                    values: self.ints(vnode)?,
                    occurs,
                    closed,
                }
            }
            "element" => {
                self.only(node, &["list", "index", "value"])?;
                let Some(inode) = self.child(node, "index") else {
                    return unsupported("element without <index>");
                };
                let index = self.list(inode)?;
                let [index] = &index[..] else {
                    return self.syntax(inode, "index must be a single variable");
                };
                let vnode = self.required(node, "value")?;
                let vtext = self.text(vnode)?;
                Constraint::Element {
                    list: self.list(self.required(node, "list")?)?,
                    index: index.clone(),
                    value: self.operand(vnode, vtext.trim())?,
                }
            }
            "channel" => {
                self.only(node, &["list"])?;
                let lists = elements(node)
                    .map(|l| self.list(l))
                    .collect::<Result<Vec<_>>>()?;
                match <[Vec<String>; 2]>::try_from(lists) {
                    Ok([first, second]) => Constraint::Channel { first, second },
                    Err(_) => return unsupported("channel over a single list"),
                }
            }
            "noOverlap" => {
                self.only(node, &["origins", "lengths"])?;
                if node.attribute("zeroIgnored") == Some("false") {
                    return unsupported("noOverlap with zeroIgnored=\"false\"");
                }
                let onode = self.required(node, "origins")?;
                let lnode = self.required(node, "lengths")?;
                let otext = self.text(onode)?;
                if !otext.trim_start().starts_with('(') {
                    return unsupported("one-dimensional noOverlap");
                }
                let pair = |n: Node, row: &[String]| -> Result<(String, String)> {
                    match row {
                        [x, y] => {
                            let mut ids = Vec::new();
                            self.expand(n, x, &mut ids)?;
                            self.expand(n, y, &mut ids)?;
                            match <[String; 2]>::try_from(ids) {
                                Ok([x, y]) => Ok((x, y)),
                                Err(_) => self.syntax(n, "origin must be two variables"),
                            }
                        }
                        _ => unsupported("noOverlap beyond two dimensions"),
                    }
                };
                let origins = self
                    .tuples(onode, &otext)?
                    .iter()
                    .map(|r| pair(onode, r))
                    .collect::<Result<Vec<_>>>()?;
                let ltext = self.text(lnode)?;
                let lengths = self
                    .tuples(lnode, &ltext)?
                    .iter()
                    .map(|r| match &r[..] {
                        [w, h] => Ok((self.operand(lnode, w)?, self.operand(lnode, h)?)),
                        _ => unsupported("noOverlap beyond two dimensions"),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Constraint::NoOverlap { origins, lengths }
            }
            "cumulative" => {
                self.only(node, &["origins", "lengths", "heights", "condition"])?;
                let condition = self.condition(self.required(node, "condition")?)?;
                let Condition::Cmp(Relation::Le, Operand::Const(limit)) = condition else {
                    return unsupported("cumulative condition other than (le,k)");
                };
                let lengths = self.ints(self.required(node, "lengths")?).map_err(|e| match e {
                    XcspError::XmlSyntax { .. } => {
                        XcspError::UnsupportedFeature("variable cumulative lengths".into())
                    }
                    e => e,
                })?;
                let heights = self.ints(self.required(node, "heights")?).map_err(|e| match e {
                    XcspError::XmlSyntax { .. } => {
                        XcspError::UnsupportedFeature("variable cumulative heights".into())
                    }
                    e => e,
                })?;
                Constraint::Cumulative {
                    origins: self.list(self.required(node, "origins")?)?,
                    lengths,
                    heights,
                    limit,
                }
            }
            "circuit" => {
                self.only(node, &["list"])?;
                let l = self.child(node, "list").unwrap_or(node);
                Constraint::Circuit(self.list(l)?)
            }
            "instantiation" => {
                self.only(node, &["list", "values"])?;
                Constraint::Instantiation {
                    scope: self.list(self.required(node, "list")?)?,
                    values: self.ints(self.required(node, "values")?)?,
                }
            }
            "slide" => {
                if node.attribute("circular") == Some("true") {
                    return unsupported("circular slide");
                }
                let lnode = self.required(node, "list")?;
                let offset = match lnode.attribute("offset") {
                    None => 1,
                    Some(o) => match o.trim().parse::<usize>() {
                        Ok(k) if k > 0 => k,
                        _ => return self.syntax(lnode, format!("invalid offset `{o}`")),
                    },
                };
                if lnode.attribute("collect").is_some() {
                    return unsupported("slide with `collect`");
                }
                let list = self.list(lnode)?;
                let templates: Vec<Node> = elements(node).filter(|c| name(*c) != "list").collect();
                let [tnode] = templates[..] else {
                    return self.syntax(node, "<slide> needs exactly one template constraint");
                };
                let template = self.template(tnode)?;
                Constraint::Slide(Slide {
                    list,
                    offset,
                    template: Box::new(template),
                })
            }
            other => {
                if ["supports", "conflicts", "list", "args"].contains(&other) {
                    return self.syntax(node, format!("unexpected <{other}>"));
                }
                return unsupported(format!("<{other}>"));
            }
        };
        out.push(c);
        Ok(())
    }

    fn template(&mut self, node: Node<'a, 'input>) -> Result<Constraint> {
        let saved = self.in_template;
        self.in_template = true;
        let mut cs = Vec::new();
        let r = self.constraint(node, &mut cs);
        self.in_template = saved;
        r?;
        match <[Constraint; 1]>::try_from(cs) {
            Ok([c]) if !matches!(c, Constraint::Slide(_)) => Ok(c),
            _ => self.syntax(node, "template must be a single constraint"),
        }
    }

    fn group(&mut self, node: Node<'a, 'input>, out: &mut Vec<Constraint>) -> Result<()> {
        let mut kids = elements(node);
        let Some(tnode) = kids.next() else {
            return self.syntax(node, "empty <group>");
        };
        let template = self.template(tnode)?;
        for a in kids {
            if name(a) != "args" {
                return unsupported(format!("<{}> in <group>", name(a)));
            }
            let mut args = Vec::new();
            for tok in self.text(a)?.split_whitespace() {
                if let Some(v) = parse_int(tok) {
                    args.push(Arg::Const(v));
                } else {
                    let mut ids = Vec::new();
                    self.expand(a, tok, &mut ids)?;
                    args.extend(ids.into_iter().map(Arg::Var));
                }
            }
            out.push(self.instantiate(a, &template, &args)?);
        }
        Ok(())
    }

    fn instantiate(&self, node: Node, template: &Constraint, args: &[Arg]) -> Result<Constraint> {
        let needed = template
            .scope()
            .iter()
            .filter_map(|v| crate::model::placeholder_index(v))
            .max()
            .map_or(0, |m| m + 1);
        if args.len() < needed {
            return self.syntax(node, format!("{} arguments for {needed} placeholders", args.len()));
        }
        if let Constraint::Intension(e) = template {
            return Ok(Constraint::Intension(substitute(e, args)));
        }
        if args.iter().any(|a| matches!(a, Arg::Const(_))) {
            return unsupported("constant group arguments outside intension");
        }
        Ok(template.map_vars(&|v| match crate::model::placeholder_index(v) {
            Some(i) => match &args[i] {
                Arg::Var(id) => id.clone(),
                Arg::Const(_) => unreachable!("constants rejected above"),
            },
            None => v.to_string(),
        }))
    }

    fn objectives(&self, node: Node<'a, 'input>) -> Result<Objective> {
        let objs: Vec<Node> = elements(node).collect();
        let [o] = objs[..] else {
            return unsupported("multiple objectives");
        };
        let sense = match name(o) {
            "minimize" => Sense::Minimize,
            "maximize" => Sense::Maximize,
            other => return unsupported(format!("<{other}> in <objectives>")),
        };
        let target = match o.attribute("type") {
            None | Some("expression") if elements(o).next().is_none() => {
                let text = self.text(o)?;
                let toks: Vec<&str> = text.split_whitespace().collect();
                match toks[..] {
                    [v] if !v.contains('(') => {
                        let mut ids = Vec::new();
                        self.expand(o, v, &mut ids)?;
                        match <[String; 1]>::try_from(ids) {
                            Ok([id]) => ObjectiveTarget::Variable(id),
                            Err(_) => return self.syntax(o, "objective must be one variable"),
                        }
                    }
                    _ => return unsupported("objective expression"),
                }
            }
            Some("sum") => {
                self.only(o, &["list", "coeffs"])?;
                let scope = self.list(self.required(o, "list")?)?;
                let coeffs = match self.child(o, "coeffs") {
                    Some(c) => self.ints(c)?,
                    None => vec![1; scope.len()],
                };
                ObjectiveTarget::Sum { scope, coeffs }
            }
            Some("maximum") => {
                self.only(o, &["list"])?;
                ObjectiveTarget::Maximum(self.list(self.required(o, "list")?)?)
            }
            Some(other) => return unsupported(format!("objective type `{other}`")),
            None => return self.syntax(o, "objective with children needs a `type`"),
        };
        Ok(Objective { sense, target })
    }
}

fn substitute(e: &Expr, args: &[Arg]) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(*c),
        Expr::Var(v) => match crate::model::placeholder_index(v).and_then(|i| args.get(i)) {
            Some(Arg::Var(id)) => Expr::Var(id.clone()),
            Some(Arg::Const(c)) => Expr::Const(*c),
            None => Expr::Var(v.clone()),
        },
        Expr::Op(op, children) => Expr::Op(*op, children.iter().map(|c| substitute(c, args)).collect()),
    }
}

/// Parses an XCSP3 document into a validated [`Instance`].
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        XcspError::XmlSyntax {
            location: SourceLocation {
                line: pos.row,
                column: pos.col,
            },
            message: e.to_string(),
        }
    })?;
    let mut ctx = Ctx {
        doc: &doc,
        variables: Vec::new(),
        known: HashMap::new(),
        arrays: HashMap::new(),
        in_template: false,
    };
    let root = doc.root_element();
    if name(root) != "instance" {
        return ctx.syntax(root, format!("root element is <{}>, expected <instance>", name(root)));
    }
    if let Some(f) = root.attribute("format") {
        if f != "XCSP3" {
            return unsupported(format!("format `{f}`"));
        }
    }
    let kind = match root.attribute("type") {
        Some("CSP") => Kind::Csp,
        Some("COP") => Kind::Cop,
        Some(t) => return unsupported(format!("instance type `{t}`")),
        None => return ctx.syntax(root, "missing `type` attribute"),
    };
    let mut constraints = Vec::new();
    let mut objective = None;
    let mut decision = None;
    for section in elements(root) {
        match name(section) {
            "variables" => ctx.variables(section)?,
            "constraints" => {
                for c in elements(section) {
                    ctx.constraint(c, &mut constraints)?;
                }
            }
            "objectives" => objective = Some(ctx.objectives(section)?),
            "annotations" => {
                for a in elements(section) {
                    match name(a) {
                        "decision" => decision = Some(ctx.list(a)?),
                        other => return unsupported(format!("annotation <{other}>")),
                    }
                }
            }
            other => return unsupported(format!("<{other}>")),
        }
    }
    let instance = Instance {
        kind,
        variables: ctx.variables,
        constraints,
        objective,
        decision,
    };
    let report = validate_instance(&instance);
    if !report.is_empty() {
        return Err(XcspError::InvariantViolation(report));
    }
    Ok(instance)
}
