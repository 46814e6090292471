use std::io::Write;
use std::path::Path;

use bnsl::graph::{parse_modelstring, Graph};
use bnsl::priors::parse_arcs;
use bnsl::{Error, Result};

/// Reads a network given inline as a model string, or as a file holding a
/// model string or a `from,to` arc list. Arc lists take their node set from
/// `nodes` when given, otherwise from the arcs themselves.
pub fn read_graph(spec: &str, nodes: Option<&[String]>) -> Result<Graph> {
    let path = Path::new(spec);
    let text = if !spec.trim_start().starts_with('[') && path.is_file() {
        std::fs::read_to_string(path)?
    } else {
        spec.to_string()
    };
    if text.trim_start().starts_with('[') {
        let g = parse_modelstring(&text, None)?;
        return match nodes {
            Some(order) => g.reordered(order),
            None => Ok(g),
        };
    }
    if !path.is_file() {
        return Err(Error::Io(format!("no such file '{spec}'")));
    }
    let rows = parse_arcs(&text)?;
    let labels: Vec<String> = match nodes {
        Some(n) => n.to_vec(),
        None => {
            let mut seen = Vec::new();
            for (a, b) in &rows {
                for l in [a, b] {
                    if !seen.contains(l) {
                        seen.push(l.clone());
                    }
                }
            }
            seen
        }
    };
    Graph::from_arc_list(&labels, &rows)
}

/// `from,to` rows; undirected arcs appear in both orientations.
pub fn arcs_text(g: &Graph) -> String {
    let mut out = String::from("from,to\n");
    for (a, b) in g.arc_list() {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}

/// Writes to the file when given, standard output otherwise.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
