use roxmltree::Document;

use super::{SourceLocation, XcspError};
use crate::model::{Assignment, Instance};

fn syntax(doc: &Document, node: roxmltree::Node, message: impl Into<String>) -> XcspError {
    let pos = doc.text_pos_at(node.range().start);
    XcspError::XmlSyntax {
        location: SourceLocation {
            line: pos.row,
            column: pos.col,
        },
        message: message.into(),
    }
}

fn parse_with(
    text: &str,
    expand: &dyn Fn(&str) -> Result<Vec<String>, XcspError>,
) -> Result<Assignment, XcspError> {
    let doc = Document::parse(text).map_err(|e| XcspError::XmlSyntax {
        location: SourceLocation {
            line: e.pos().row,
            column: e.pos().col,
        },
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "instantiation" {
        return Err(syntax(&doc, root, "expected <instantiation>"));
    }
    let child = |tag: &str| {
        root.children()
            .find(|c| c.is_element() && c.tag_name().name() == tag)
            .ok_or_else(|| syntax(&doc, root, format!("missing <{tag}>")))
    };
    let text_of = |n: roxmltree::Node| -> String {
        n.children().filter_map(|c| c.text()).collect()
    };
    let list_node = child("list")?;
    let mut ids = Vec::new();
    for tok in text_of(list_node).split_whitespace() {
        ids.extend(expand(tok)?);
    }
    let values_node = child("values")?;
    let mut values = Vec::new();
    for tok in text_of(values_node).split_whitespace() {
        if tok == "*" {
            return Err(XcspError::UnsupportedFeature("`*` in solution values".into()));
        }
        match tok.parse::<i64>() {
            Ok(v) => values.push(v),
            Err(_) => {
                return Err(syntax(
                    &doc,
                    values_node,
                    format!("expected an integer, found `{tok}`"),
                ))
            }
        }
    }
    if ids.len() != values.len() {
        return Err(XcspError::LengthMismatch {
            list: ids.len(),
            values: values.len(),
        });
    }
    Ok(ids.into_iter().zip(values).collect())
}

/// Reads an `<instantiation>` fragment whose list names variables
/// explicitly.
pub fn parse_solution(text: &str) -> Result<Assignment, XcspError> {
    parse_with(text, &|tok| Ok(vec![tok.to_string()]))
}

/// Like [`parse_solution`], also expanding compact array references such
/// as `x[]` against the variables of `instance`.
pub fn parse_solution_for(text: &str, instance: &Instance) -> Result<Assignment, XcspError> {
    parse_with(text, &|tok| {
        if instance.variable(tok).is_some() || !tok.contains('[') {
            return Ok(vec![tok.to_string()]);
        }
        let stem = &tok[..tok.find('[').unwrap_or(tok.len())];
        let pats: Vec<&str> = tok[stem.len()..]
            .split(']')
            .filter(|s| !s.is_empty())
            .map(|s| s.trim_start_matches('['))
            .collect();
        let matches = |id: &str| -> bool {
            let Some(rest) = id.strip_prefix(stem) else {
                return false;
            };
            let idx: Vec<&str> = rest
                .split(']')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim_start_matches('['))
                .collect();
            rest.starts_with('[')
                && idx.len() == pats.len()
                && idx.iter().zip(&pats).all(|(i, p)| {
                    if p.is_empty() {
                        return true;
                    }
                    let Ok(i) = i.parse::<i64>() else { return false };
                    match p.split_once("..") {
                        Some((a, b)) => match (a.parse::<i64>(), b.parse::<i64>()) {
                            (Ok(a), Ok(b)) => a <= i && i <= b,
                            _ => false,
                        },
                        None => p.parse::<i64>() == Ok(i),
                    }
                })
        };
        let ids: Vec<String> = instance
            .variables
            .iter()
            .filter(|v| matches(&v.id))
            .map(|v| v.id.clone())
            .collect();
        if ids.is_empty() {
            Err(XcspError::UnknownVariable(tok.to_string()))
        } else {
            Ok(ids)
        }
    })
}

/// Single-line `<instantiation>` listing the instance variables in
/// declaration order. Variables missing from `assignment` are skipped.
pub fn write_solution(instance: &Instance, assignment: &Assignment, cost: Option<i64>) -> String {
    let mut ids = Vec::new();
    let mut vals = Vec::new();
    for v in &instance.variables {
        if let Some(x) = assignment.get(&v.id) {
            ids.push(v.id.as_str());
            vals.push(x.to_string());
        }
    }
    let attrs = match cost {
        Some(c) => format!(" type=\"solution\" cost=\"{c}\""),
        None => " type=\"solution\"".to_string(),
    };
    format!(
        "<instantiation{attrs}> <list> {} </list> <values> {} </values> </instantiation>",
        ids.join(" "),
        vals.join(" ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, Variable};

    #[test]
    fn pairs_list_and_values() {
        let a = parse_solution("<instantiation> <list> x y </list> <values> 1 2 </values> </instantiation>")
            .unwrap();
        assert_eq!(a.get("x"), Some(1));
        assert_eq!(a.get("y"), Some(2));
    }

    #[test]
    fn length_mismatch() {
        let e = parse_solution("<instantiation><list> x y </list><values> 1 </values></instantiation>")
            .unwrap_err();
        assert_eq!(e, XcspError::LengthMismatch { list: 2, values: 1 });
    }

    #[test]
    fn star_rejected() {
        let e = parse_solution("<instantiation><list> x </list><values> * </values></instantiation>")
            .unwrap_err();
        assert!(matches!(e, XcspError::UnsupportedFeature(_)));
    }

    #[test]
    fn round_trip_with_compact_list() {
        let inst = Instance::new(
            (0..3)
                .map(|i| Variable::new(format!("x[{i}]"), Domain::range(0, 5)))
                .collect(),
            vec![],
        );
        let a: Assignment = [("x[0]", 3), ("x[1]", 0), ("x[2]", 5)].into_iter().collect();
        let line = write_solution(&inst, &a, None);
        assert_eq!(parse_solution(&line).unwrap(), a);
        let compact = "<instantiation><list> x[] </list><values> 3 0 5 </values></instantiation>";
        assert_eq!(parse_solution_for(compact, &inst).unwrap(), a);
    }
}
