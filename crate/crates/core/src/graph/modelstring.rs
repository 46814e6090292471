//! Bracket notation for completely directed graphs: `[A][B|A][C|A:B]`.

use std::collections::HashSet;

use super::{valid_label, Graph};
use crate::error::{Error, Result};

/// Parses a model string. Node order follows the order of the blocks unless
/// `nodes` supplies an explicit order covering exactly the declared nodes.
pub fn parse_modelstring(s: &str, nodes: Option<&[String]>) -> Result<Graph> {
    let mut blocks: Vec<(String, Vec<String>)> = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('[')
            .ok_or_else(|| Error::ModelString(format!("expected '[' at '{rest}'")))?;
        let close = body_start
            .find(']')
            .ok_or_else(|| Error::ModelString("unterminated block".into()))?;
        let body = &body_start[..close];
        rest = body_start[close + 1..].trim_start();

        let (node, parents) = match body.split_once('|') {
            Some((node, parents)) => {
                let parents: Vec<String> = parents.split(':').map(|p| p.trim().to_string()).collect();
                (node.trim().to_string(), parents)
            }
            None => (body.trim().to_string(), Vec::new()),
        };
        if !valid_label(&node) {
            return Err(Error::ModelString(format!("invalid node label '{node}'")));
        }
        if let Some(bad) = parents.iter().find(|p| !valid_label(p)) {
            return Err(Error::ModelString(format!("invalid parent label '{bad}' in block '{node}'")));
        }
        blocks.push((node, parents));
    }
    if blocks.is_empty() {
        return Err(Error::ModelString("empty model string".into()));
    }

    // Duplicate blocks are merged first so that a cyclic specification is
    // reported as a cycle; the duplicate itself is reported afterwards.
    let mut declared = HashSet::new();
    let mut first_order = Vec::new();
    let mut duplicate = None;
    for (node, _) in &blocks {
        if declared.insert(node.as_str()) {
            first_order.push(node.clone());
        } else if duplicate.is_none() {
            duplicate = Some(node.clone());
        }
    }
    let order: Vec<String> = match nodes {
        Some(list) => {
            if list.len() != declared.len() || list.iter().any(|n| !declared.contains(n.as_str())) {
                return Err(Error::NodeMismatch);
            }
            list.to_vec()
        }
        None => first_order,
    };

    let mut g = Graph::new(order)?;
    for (node, parents) in &blocks {
        let child = g.index_of(node)?;
        for p in parents {
            let parent = g.index_of(p)?;
            g.insert_directed(parent, child)?;
        }
    }
    if let Some(node) = duplicate {
        return Err(Error::DuplicateNode(node));
    }
    Ok(g)
}

/// Emits nodes in topological order (ties by label) with label-sorted
/// parents.
pub fn format_modelstring(g: &Graph) -> Result<String> {
    if !g.is_directed() {
        return Err(Error::NotDirected);
    }
    let mut out = String::new();
    for v in g.topological_order()? {
        out.push('[');
        out.push_str(g.label(v));
        let mut parents: Vec<&str> = g.parents_of(v).into_iter().map(|p| g.label(p)).collect();
        parents.sort_unstable();
        if !parents.is_empty() {
            out.push('|');
            out.push_str(&parents.join(":"));
        }
        out.push(']');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = "[A][C][F][B|A][D|A:C][E|B:F]";

    #[test]
    fn parses_reference_string() {
        let g = parse_modelstring(REFERENCE, None).unwrap();
        let mut arcs = g.directed_arc_list();
        arcs.sort();
        let expected: Vec<(String, String)> = [("A", "B"), ("A", "D"), ("B", "E"), ("C", "D"), ("F", "E")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(arcs, expected);
        assert_eq!(g.nodes(), &["A", "C", "F", "B", "D", "E"]);
    }

    #[test]
    fn formats_reference_string() {
        let g = parse_modelstring("[E|F:B][D|C:A][B|A][A][F][C]", None).unwrap();
        assert_eq!(format_modelstring(&g).unwrap(), REFERENCE);
    }

    #[test]
    fn single_node() {
        let g = parse_modelstring("[X]", None).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.n_arcs(), 0);
        assert_eq!(format_modelstring(&g).unwrap(), "[X]");
    }

    #[test]
    fn rejects_cycles_and_garbage() {
        assert_eq!(parse_modelstring("[A][B|A][C|B][A|C]", None).unwrap_err(), Error::Cycle);
        assert_eq!(parse_modelstring("[A][B|A][A]", None).unwrap_err(), Error::DuplicateNode("A".into()));
        assert_eq!(parse_modelstring("[A|C][B|A][C|B]", None).unwrap_err(), Error::Cycle);
        assert!(matches!(parse_modelstring("[A][B|Q]", None), Err(Error::UnknownNode(_))));
        assert!(matches!(parse_modelstring("[A", None), Err(Error::ModelString(_))));
        assert!(matches!(parse_modelstring("A]", None), Err(Error::ModelString(_))));
        assert!(matches!(parse_modelstring("", None), Err(Error::ModelString(_))));
        assert!(matches!(parse_modelstring("[A|]", None), Err(Error::ModelString(_))));
    }

    #[test]
    fn explicit_node_order() {
        let order: Vec<String> = ["B", "A"].iter().map(|s| s.to_string()).collect();
        let g = parse_modelstring("[A][B|A]", Some(&order)).unwrap();
        assert_eq!(g.nodes(), &["B", "A"]);
        let bad: Vec<String> = vec!["A".into()];
        assert_eq!(parse_modelstring("[A][B|A]", Some(&bad)).unwrap_err(), Error::NodeMismatch);
    }

    #[test]
    fn undirected_graphs_have_no_model_string() {
        let g = Graph::from_arcs(&["A", "B"], &[], &[("A", "B")]).unwrap();
        assert_eq!(format_modelstring(&g).unwrap_err(), Error::NotDirected);
    }
}
