use std::collections::BTreeSet;
use std::fmt;

use super::{ArcList, Graph};
use crate::error::{Error, Result};

/// Outcome of comparing two graphs over the same nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub equal: bool,
    pub directed_only_first: ArcList,
    pub directed_only_second: ArcList,
    pub undirected_only_first: ArcList,
    pub undirected_only_second: ArcList,
    pub node_diffs: Vec<NodeDiff>,
}

/// Parent and child sets of a node that differ between the two graphs.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeDiff {
    pub node: String,
    pub parents: (Vec<String>, Vec<String>),
    pub children: (Vec<String>, Vec<String>),
}

pub fn compare(first: &Graph, second: &Graph) -> Result<Comparison> {
    let n1: BTreeSet<&String> = first.nodes().iter().collect();
    let n2: BTreeSet<&String> = second.nodes().iter().collect();
    if n1 != n2 {
        return Err(Error::NodeMismatch);
    }
    let (d1, u1) = first.labelled_sets();
    let (d2, u2) = second.labelled_sets();
    let diff = |a: &BTreeSet<(String, String)>, b: &BTreeSet<(String, String)>| -> ArcList {
        a.difference(b).cloned().collect()
    };
    let labels = |g: &Graph, idx: Vec<usize>| -> Vec<String> {
        let mut v: Vec<String> = idx.into_iter().map(|i| g.label(i).to_string()).collect();
        v.sort();
        v
    };

    let mut node_diffs = Vec::new();
    for node in n1 {
        let (i, j) = (first.index_of(node)?, second.index_of(node)?);
        let parents = (labels(first, first.parents_of(i)), labels(second, second.parents_of(j)));
        let children = (labels(first, first.children_of(i)), labels(second, second.children_of(j)));
        if parents.0 != parents.1 || children.0 != children.1 {
            node_diffs.push(NodeDiff { node: node.clone(), parents, children });
        }
    }

    Ok(Comparison {
        equal: d1 == d2 && u1 == u2,
        directed_only_first: diff(&d1, &d2),
        directed_only_second: diff(&d2, &d1),
        undirected_only_first: diff(&u1, &u2),
        undirected_only_second: diff(&u2, &u1),
        node_diffs,
    })
}

fn arcs(f: &mut fmt::Formatter<'_>, title: &str, rows: &ArcList, sep: &str) -> fmt::Result {
    if rows.is_empty() {
        return Ok(());
    }
    writeln!(f, "{title}:")?;
    for (a, b) in rows {
        writeln!(f, "  {a} {sep} {b}")?;
    }
    Ok(())
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.equal { "true" } else { "false" })?;
        arcs(f, "directed arcs only in the first graph", &self.directed_only_first, "->")?;
        arcs(f, "directed arcs only in the second graph", &self.directed_only_second, "->")?;
        arcs(f, "undirected arcs only in the first graph", &self.undirected_only_first, "-")?;
        arcs(f, "undirected arcs only in the second graph", &self.undirected_only_second, "-")?;
        for d in &self.node_diffs {
            writeln!(
                f,
                "node {}: parents ' {} ' vs ' {} ', children ' {} ' vs ' {} '",
                d.node,
                d.parents.0.join(" "),
                d.parents.1.join(" "),
                d.children.0.join(" "),
                d.children.1.join(" ")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_modelstring;

    #[test]
    fn reflexive() {
        let g = parse_modelstring("[A][C][F][B|A][D|A:C][E|B:F]", None).unwrap();
        let c = compare(&g, &g).unwrap();
        assert!(c.equal);
        assert!(c.node_diffs.is_empty());
    }

    #[test]
    fn undirected_versus_directed() {
        let dag = parse_modelstring("[A][C][F][B|A][D|A:C][E|B:F]", None).unwrap();
        let pdag = dag.without_edge(0, 3).with_undirected(0, 3).unwrap();
        let c = compare(&dag, &pdag).unwrap();
        assert!(!c.equal);
        assert_eq!(c.directed_only_first, vec![("A".to_string(), "B".to_string())]);
        assert_eq!(c.undirected_only_second, vec![("A".to_string(), "B".to_string())]);
        assert_eq!(c.node_diffs.len(), 2);
        assert!(c.to_string().starts_with("false\n"));
    }

    #[test]
    fn node_order_is_irrelevant() {
        let g = parse_modelstring("[A][B|A]", None).unwrap();
        let h = parse_modelstring("[B|A][A]", None).unwrap();
        assert!(compare(&g, &h).unwrap().equal);
    }

    #[test]
    fn node_mismatch() {
        let g = parse_modelstring("[A][B|A]", None).unwrap();
        let h = parse_modelstring("[A][C|A]", None).unwrap();
        assert_eq!(compare(&g, &h).unwrap_err(), Error::NodeMismatch);
    }
}
