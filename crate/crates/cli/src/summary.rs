use std::fmt::Write;

use bnsl::graph::{format_modelstring, Graph};

const WIDTH: usize = 41;

fn field(out: &mut String, indent: &str, name: &str, value: impl std::fmt::Display) {
    let label = format!("{indent}{name}:");
    let _ = writeln!(out, "{label:<WIDTH$}{value}");
}

// Shortest decimal form with at most seven significant digits.
fn number(x: f64) -> String {
    let s = format!("{:.*}", 6usize.saturating_sub(x.abs().log10().floor().max(0.0) as usize), x);
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Text block describing a learned network and how it was obtained.
pub fn render(g: &Graph) -> String {
    let p = &g.provenance;
    let score_based = p.alpha.is_none() && p.algorithm.is_some();
    let mut out = String::new();
    match &p.algorithm {
        Some(_) if score_based => out.push_str("\n  Bayesian network learned via Score-based methods\n\n"),
        Some(_) => out.push_str("\n  Bayesian network learned via Constraint-based methods\n\n"),
        None => out.push_str("\n  Bayesian network\n\n"),
    }
    out.push_str("  model:\n");
    match format_modelstring(g) {
        Ok(m) => {
            let _ = writeln!(out, "    {m}");
        }
        Err(_) => out.push_str("    [partially directed graph]\n"),
    }
    field(&mut out, "  ", "nodes", g.len());
    field(&mut out, "  ", "arcs", g.n_arcs());
    field(&mut out, "    ", "undirected arcs", g.n_undirected());
    field(&mut out, "    ", "directed arcs", g.n_directed());
    field(&mut out, "  ", "average markov blanket size", format!("{:.2}", g.average_markov_blanket_size()));
    field(&mut out, "  ", "average neighbourhood size", format!("{:.2}", g.average_neighbourhood_size()));
    field(&mut out, "  ", "average branching factor", format!("{:.2}", g.average_branching_factor()));
    if let Some(algo) = &p.algorithm {
        out.push('\n');
        field(&mut out, "  ", "learning algorithm", algo);
        let criterion = p.criterion.as_deref().unwrap_or("unknown");
        if score_based {
            field(&mut out, "  ", "score", criterion);
            if let Some(k) = p.penalty {
                field(&mut out, "  ", "penalization coefficient", number(k));
            }
        } else {
            field(&mut out, "  ", "conditional independence test", criterion);
            if let Some(a) = p.alpha {
                field(&mut out, "  ", "alpha threshold", number(a));
            }
        }
        field(&mut out, "  ", "tests used in the learning procedure", p.tests);
        if let Some(o) = p.optimized {
            field(&mut out, "  ", "optimized", if o { "TRUE" } else { "FALSE" });
        }
    }
    out
}
