use std::sync::Arc;

use super::XcspError;
use crate::model::{
    validate_instance, Condition, Constraint, Domain, Instance, Occurs, Operand, ObjectiveTarget,
    Polarity, Sense, Table, Variable,
};

/// Splits `x[1][2]` into `("x", [1, 2])`; `None` for scalar names.
fn split_indices(id: &str) -> Option<(&str, Vec<usize>)> {
    let open = id.find('[')?;
    let mut idx = Vec::new();
    let mut rest = &id[open..];
    while !rest.is_empty() {
        let close = rest.find(']')?;
        idx.push(rest[1..close].parse().ok()?);
        rest = &rest[close + 1..];
    }
    Some((&id[..open], idx))
}

struct Out {
    buf: String,
    depth: usize,
}

impl Out {
    fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.buf.push_str("  ");
        }
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    fn open(&mut self, s: &str) {
        self.line(s);
        self.depth += 1;
    }

    fn close(&mut self, s: &str) {
        self.depth -= 1;
        self.line(s);
    }

    /// `<tag> text </tag>` on one line.
    fn leaf(&mut self, tag: &str, text: &str) {
        let bare = tag.split_whitespace().next().unwrap_or(tag);
        if text.is_empty() {
            self.line(&format!("<{tag}> </{bare}>"));
        } else {
            self.line(&format!("<{tag}> {text} </{bare}>"));
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn tuples<T: AsRef<[String]>>(rows: &[T]) -> String {
    rows.iter()
        .map(|r| format!("({})", r.as_ref().join(",")))
        .collect()
}

fn condition(c: &Condition) -> String {
    match c {
        Condition::Cmp(r, op) => format!("({},{op})", r.name()),
        Condition::In(a, b) => format!("(in,{a}..{b})"),
    }
}

fn table_body(t: &Table) -> String {
    if t.arity() == 1 {
        join(&t.rows().iter().map(|r| r[0].to_string()).collect::<Vec<_>>())
    } else {
        t.rows()
            .iter()
            .map(|r| {
                format!(
                    "({})",
                    r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                )
            })
            .collect()
    }
}

fn polarity_tag(t: &Table) -> &'static str {
    match t.polarity() {
        Polarity::Supports => "supports",
        Polarity::Conflicts => "conflicts",
    }
}

/// Maximal runs of consecutive variables forming a full row-major block
/// of one array stem, as `(start, end, stem, dims)`.
fn array_runs(vars: &[Variable]) -> Vec<(usize, usize, String, Vec<usize>)> {
    let parsed: Vec<Option<(&str, Vec<usize>)>> =
        vars.iter().map(|v| split_indices(&v.id)).collect();
    let stem_of = |i: usize| {
        parsed[i]
            .as_ref()
            .map_or(vars[i].id.as_str(), |(s, _)| *s)
    };
    let mut runs = Vec::new();
    let mut i = 0;
    while i < vars.len() {
        let Some((stem, first)) = &parsed[i] else {
            i += 1;
            continue;
        };
        let mut j = i + 1;
        while j < vars.len()
            && parsed[j]
                .as_ref()
                .is_some_and(|(s, idx)| s == stem && idx.len() == first.len())
        {
            j += 1;
        }
        // the block must enumerate the whole product of its extents
        let dims: Vec<usize> = (0..first.len())
            .map(|d| {
                (i..j)
                    .map(|k| parsed[k].as_ref().unwrap().1[d])
                    .max()
                    .unwrap()
                    + 1
            })
            .collect();
        let full = dims.iter().product::<usize>() == j - i
            && (i..j).enumerate().all(|(n, k)| {
                let idx = &parsed[k].as_ref().unwrap().1;
                let mut rem = n;
                let mut expected = vec![0; dims.len()];
                for d in (0..dims.len()).rev() {
                    expected[d] = rem % dims[d];
                    rem /= dims[d];
                }
                *idx == expected
            });
        let shared_elsewhere = (0..vars.len())
            .filter(|k| *k < i || *k >= j)
            .any(|k| stem_of(k) == *stem);
        if full && !shared_elsewhere {
            runs.push((i, j, stem.to_string(), dims));
        }
        i = j;
    }
    runs
}

fn write_variables(out: &mut Out, vars: &[Variable]) {
    out.open("<variables>");
    let runs = array_runs(vars);
    let mut next_run = runs.iter().peekable();
    let mut i = 0;
    while i < vars.len() {
        if let Some((start, end, stem, dims)) = next_run.peek().filter(|r| r.0 == i) {
            let size: String = dims.iter().map(|d| format!("[{d}]")).collect();
            let cells = &vars[*start..*end];
            if cells.iter().all(|v| v.domain == cells[0].domain) {
                out.leaf(
                    &format!("array id=\"{stem}\" size=\"{size}\""),
                    &cells[0].domain.to_string(),
                );
            } else {
                out.open(&format!("<array id=\"{stem}\" size=\"{size}\">"));
                let mut groups: Vec<(&Domain, Vec<&str>)> = Vec::new();
                for v in cells {
                    match groups.iter_mut().find(|(d, _)| **d == v.domain) {
                        Some((_, ids)) => ids.push(&v.id),
                        None => groups.push((&v.domain, vec![&v.id])),
                    }
                }
                for (d, ids) in groups {
                    out.leaf(&format!("domain for=\"{}\"", ids.join(" ")), &d.to_string());
                }
                out.close("</array>");
            }
            i = *end;
            next_run.next();
        } else {
            let v = &vars[i];
            out.leaf(&format!("var id=\"{}\"", v.id), &v.domain.to_string());
            i += 1;
        }
    }
    out.close("</variables>");
}

fn operands(ops: &[Operand]) -> String {
    join(ops)
}

fn write_constraint(out: &mut Out, c: &Constraint) {
    match c {
        Constraint::Intension(e) => out.leaf("intension", &e.to_string()),
        Constraint::Extension { scope, table } => {
            out.open("<extension>");
            out.leaf("list", &scope.join(" "));
            out.leaf(polarity_tag(table), &table_body(table));
            out.close("</extension>");
        }
        Constraint::Regular { scope, automaton } => {
            out.open("<regular>");
            out.leaf("list", &scope.join(" "));
            let ts: String = automaton
                .transitions
                .iter()
                .map(|t| format!("({},{},{})", t.from, t.symbol, t.to))
                .collect();
            out.leaf("transitions", &ts);
            out.leaf("start", &automaton.start);
            out.leaf("final", &automaton.finals.join(" "));
            out.close("</regular>");
        }
        Constraint::AllDifferent(scope) => out.leaf("allDifferent", &scope.join(" ")),
        Constraint::AllDifferentMatrix(m) => {
            out.open("<allDifferent>");
            out.leaf("matrix", &tuples(m));
            out.close("</allDifferent>");
        }
        Constraint::Ordered { scope, op } => {
            out.open("<ordered>");
            out.leaf("list", &scope.join(" "));
            out.leaf("operator", op.name());
            out.close("</ordered>");
        }
        Constraint::Lex { lists, op } => {
            out.open("<lex>");
            for l in lists {
                out.leaf("list", &l.join(" "));
            }
            out.leaf("operator", op.name());
            out.close("</lex>");
        }
        Constraint::LexMatrix { matrix, op } => {
            out.open("<lex>");
            out.leaf("matrix", &tuples(matrix));
            out.leaf("operator", op.name());
            out.close("</lex>");
        }
        Constraint::Sum {
            scope,
            coeffs,
            condition: cond,
        } => {
            out.open("<sum>");
            out.leaf("list", &scope.join(" "));
            if coeffs.iter().any(|c| *c != Operand::Const(1)) {
                out.leaf("coeffs", &operands(coeffs));
            }
            out.leaf("condition", &condition(cond));
            out.close("</sum>");
        }
        Constraint::Count {
            scope,
            values,
            condition: cond,
        } => {
            out.open("<count>");
            out.leaf("list", &scope.join(" "));
            out.leaf("values", &join(values));
            out.leaf("condition", &condition(cond));
            out.close("</count>");
        }
        Constraint::Cardinality {
            scope,
            values,
            occurs,
            closed,
        } => {
            out.open("<cardinality>");
            out.leaf("list", &scope.join(" "));
            let tag = if *closed {
                "values closed=\"true\""
            } else {
                "values"
            };
            out.leaf(tag, &join(values));
            let occ: Vec<String> = occurs
                .iter()
                .map(|o| match o {
                    Occurs::Exact(k) => k.to_string(),
                    Occurs::Between(a, b) => format!("{a}..{b}"),
                })
                .collect();
            out.leaf("occurs", &occ.join(" "));
            out.close("</cardinality>");
        }
        Constraint::Element { list, index, value } => {
            out.open("<element>");
            out.leaf("list", &list.join(" "));
            out.leaf("index", index);
            out.leaf("value", &value.to_string());
            out.close("</element>");
        }
        Constraint::Channel { first, second } => {
            out.open("<channel>");
            out.leaf("list", &first.join(" "));
            out.leaf("list", &second.join(" "));
            out.close("</channel>");
        }
        Constraint::NoOverlap { origins, lengths } => {
            out.open("<noOverlap>");
            let o: String = origins.iter().map(|(x, y)| format!("({x},{y})")).collect();
            let l: String = lengths.iter().map(|(w, h)| format!("({w},{h})")).collect();
            out.leaf("origins", &o);
            out.leaf("lengths", &l);
            out.close("</noOverlap>");
        }
        Constraint::Cumulative {
            origins,
            lengths,
            heights,
            limit,
        } => {
            out.open("<cumulative>");
            out.leaf("origins", &origins.join(" "));
            out.leaf("lengths", &join(lengths));
            out.leaf("heights", &join(heights));
            out.leaf("condition", &format!("(le,{limit})"));
            out.close("</cumulative>");
        }
        Constraint::Circuit(scope) => out.leaf("circuit", &scope.join(" ")),
        Constraint::Instantiation { scope, values } => {
            out.open("<instantiation>");
            out.leaf("list", &scope.join(" "));
            out.leaf("values", &join(values));
            out.close("</instantiation>");
        }
        Constraint::Slide(s) => {
            out.open("<slide>");
            if s.offset == 1 {
                out.leaf("list", &s.list.join(" "));
            } else {
                out.leaf(&format!("list offset=\"{}\"", s.offset), &s.list.join(" "));
            }
            write_constraint(out, &s.template);
            out.close("</slide>");
        }
    }
}

fn same_table(a: &Arc<Table>, b: &Arc<Table>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn write_constraints(out: &mut Out, cs: &[Constraint]) {
    out.open("<constraints>");
    let mut i = 0;
    while i < cs.len() {
        // consecutive extensions over one table are written as a group
        if let Constraint::Extension { scope, table } = &cs[i] {
            let mut j = i + 1;
            while let Some(Constraint::Extension { scope: s, table: t }) = cs.get(j) {
                if s.len() != scope.len() || !same_table(t, table) {
                    break;
                }
                j += 1;
            }
            if j - i >= 2 {
                out.open("<group>");
                out.open("<extension>");
                let ph: Vec<String> = (0..scope.len()).map(|k| format!("%{k}")).collect();
                out.leaf("list", &ph.join(" "));
                out.leaf(polarity_tag(table), &table_body(table));
                out.close("</extension>");
                for c in &cs[i..j] {
                    if let Constraint::Extension { scope, .. } = c {
                        out.leaf("args", &scope.join(" "));
                    }
                }
                out.close("</group>");
                i = j;
                continue;
            }
        }
        write_constraint(out, &cs[i]);
        i += 1;
    }
    out.close("</constraints>");
}

/// Canonical XCSP3 text of a valid instance.
pub fn write_instance(instance: &Instance) -> Result<String, XcspError> {
    let report = validate_instance(instance);
    if !report.is_empty() {
        return Err(XcspError::InvariantViolation(report));
    }
    let mut out = Out {
        buf: String::new(),
        depth: 0,
    };
    out.open(&format!(
        "<instance format=\"XCSP3\" type=\"{}\">",
        instance.kind.name()
    ));
    write_variables(&mut out, &instance.variables);
    write_constraints(&mut out, &instance.constraints);
    if let Some(obj) = &instance.objective {
        out.open("<objectives>");
        let tag = match obj.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        match &obj.target {
            ObjectiveTarget::Variable(v) => out.leaf(tag, v),
            ObjectiveTarget::Sum { scope, coeffs } => {
                out.open(&format!("<{tag} type=\"sum\">"));
                out.leaf("list", &scope.join(" "));
                if coeffs.iter().any(|&c| c != 1) {
                    out.leaf("coeffs", &join(coeffs));
                }
                out.close(&format!("</{tag}>"));
            }
            ObjectiveTarget::Maximum(scope) => {
                out.open(&format!("<{tag} type=\"maximum\">"));
                out.leaf("list", &scope.join(" "));
                out.close(&format!("</{tag}>"));
            }
        }
        out.close("</objectives>");
    }
    if let Some(dec) = &instance.decision {
        out.open("<annotations>");
        out.leaf("decision", &dec.join(" "));
        out.close("</annotations>");
    }
    out.close("</instance>");
    Ok(out.buf)
}
