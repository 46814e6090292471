//! v-structure detection and direction propagation on partially directed
//! graphs.

use super::Graph;
use crate::error::{Error, Result};

/// A converging connection `left -> center <- right` with non-adjacent
/// parents, `left < right` by label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct VStructure {
    pub left: String,
    pub center: String,
    pub right: String,
}

/// Every v-structure formed by directed arcs, sorted.
pub fn find_vstructures(g: &Graph) -> Vec<VStructure> {
    let mut out = Vec::new();
    for center in 0..g.len() {
        let parents = g.parents_of(center);
        for (i, &p) in parents.iter().enumerate() {
            for &q in &parents[i + 1..] {
                if g.adjacent(p, q) {
                    continue;
                }
                let (l, r) = if g.label(p) < g.label(q) { (p, q) } else { (q, p) };
                out.push(VStructure {
                    left: g.label(l).to_string(),
                    center: g.label(center).to_string(),
                    right: g.label(r).to_string(),
                });
            }
        }
    }
    out.sort();
    out
}

/// Equivalence class representative of a DAG: its skeleton with only the
/// v-structure arcs directed, closed under the orientation rules.
pub fn cpdag(g: &Graph) -> Result<Graph> {
    if !g.is_directed() {
        return Err(Error::NotDirected);
    }
    let mut pattern = g.without_arcs();
    for (a, b) in g.directed_arcs() {
        pattern.insert_undirected(a, b)?;
    }
    for v in find_vstructures(g) {
        let c = g.index_of(&v.center)?;
        for end in [&v.left, &v.right] {
            pattern.insert_directed(g.index_of(end)?, c)?;
        }
    }
    Ok(extend_pdag(&pattern))
}

/// What direction propagation did.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Propagation {
    /// Arcs oriented, in application order.
    pub oriented: Vec<(String, String)>,
    /// Undirected arcs for which both orientations were forced; left as is.
    pub conflicts: Vec<(String, String)>,
}

/// Applies the orientation rules until nothing changes; see
/// [`extend_pdag_with_report`].
pub fn extend_pdag(g: &Graph) -> Graph {
    extend_pdag_with_report(g).0
}

/// Orients undirected arcs whose reverse would create a new v-structure or
/// a directed cycle:
///
/// 1. `w -> x - y`, `w` and `y` non-adjacent: orient `x -> y`;
/// 2. a directed path `x ~> y` exists: orient `x -> y`;
/// 3. `x - c -> y`, `x - d -> y`, `c` and `d` non-adjacent: orient `x -> y`.
///
/// Already directed arcs are never touched. Arcs forced both ways are
/// reported as conflicts and stay undirected.
pub fn extend_pdag_with_report(g: &Graph) -> (Graph, Propagation) {
    let mut g = g.clone();
    let mut report = Propagation::default();
    loop {
        let mut applied = false;
        let edges: Vec<(usize, usize)> = g.undirected_arcs().collect();
        for (a, b) in edges {
            let ab = forced(&g, a, b);
            let ba = forced(&g, b, a);
            let (from, to) = match (ab, ba) {
                (true, false) => (a, b),
                (false, true) => (b, a),
                (true, true) => {
                    let pair = (g.label(a).to_string(), g.label(b).to_string());
                    if !report.conflicts.contains(&pair) {
                        report.conflicts.push(pair);
                    }
                    continue;
                }
                (false, false) => continue,
            };
            if g.insert_directed(from, to).is_ok() {
                report.oriented.push((g.label(from).to_string(), g.label(to).to_string()));
                applied = true;
                break;
            }
        }
        if !applied {
            break;
        }
    }
    report.conflicts.retain(|(a, b)| {
        let (a, b) = (g.index_of(a).unwrap(), g.index_of(b).unwrap());
        g.has_undirected(a, b)
    });
    (g, report)
}

fn forced(g: &Graph, x: usize, y: usize) -> bool {
    // rule 1
    if g.parents_of(x).into_iter().any(|w| w != y && !g.adjacent(w, y)) {
        return true;
    }
    // rule 2
    if g.has_directed_path(x, y) {
        return true;
    }
    // rule 3
    let shared: Vec<usize> = g
        .undirected_neighbours_of(x)
        .into_iter()
        .filter(|&c| c != y && g.has_arc(c, y))
        .collect();
    for (i, &c) in shared.iter().enumerate() {
        for &d in &shared[i + 1..] {
            if !g.adjacent(c, d) {
                return true;
            }
        }
    }
    false
}
