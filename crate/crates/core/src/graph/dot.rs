use std::fmt::Write;

use super::Graph;

/// Graphviz DOT text: directed arcs as `->`, undirected ones with
/// `dir=none`.
pub fn to_dot(g: &Graph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", name.replace('"', "\\\""));
    for label in g.nodes() {
        let _ = writeln!(out, "  \"{label}\";");
    }
    for (a, b) in g.directed_arcs() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", g.label(a), g.label(b));
    }
    for (a, b) in g.undirected_arcs() {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [dir=none];", g.label(a), g.label(b));
    }
    out.push_str("}\n");
    out
}
