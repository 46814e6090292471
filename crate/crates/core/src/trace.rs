//! Event log of a learning run.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    /// Start of a learning phase, e.g. "learning markov blanket of A".
    Phase(String),
    /// One conditional independence test.
    Test { x: String, y: String, z: Vec<String>, statistic: f64, p_value: f64 },
    /// A node entered the Markov blanket (or candidate neighbour set).
    Included { target: String, node: String, p_value: f64, now: Vec<String> },
    /// A node left the Markov blanket during shrinking.
    Excluded { target: String, node: String, p_value: f64 },
    /// Blanket members and non-members reused from earlier nodes.
    Backtrack { target: String, good: Vec<String>, bad: Vec<String> },
    /// Outcome of the neighbourhood search for a pair.
    Neighbour { x: String, y: String, neighbour: bool, dsep: Option<Vec<String>> },
    /// Candidate v-structure with the p-value of its confirming test.
    VStructure { left: String, center: String, right: String, p_value: f64, applied: bool },
    /// A hill-climbing step.
    Step { description: String, delta: f64, score: f64 },
    /// Anything else worth reporting.
    Note(String),
}

fn set(nodes: &[String]) -> String {
    format!("' {} '", nodes.join(" "))
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Phase(s) => write!(f, "* {s} ."),
            TraceEvent::Test { x, y, z, p_value, .. } => {
                write!(f, "    > testing {x} vs {y} given {} ( p-value: {p_value:e} ).", set(z))
            }
            TraceEvent::Included { node, p_value, now, .. } => write!(
                f,
                "    > node {node} included in the markov blanket ( p-value: {p_value:e} ).\n    > markov blanket now is {}.",
                set(now)
            ),
            TraceEvent::Excluded { node, p_value, .. } => {
                write!(f, "    > node {node} removed from the markov blanket. ( p-value: {p_value:e} )")
            }
            TraceEvent::Backtrack { good, bad, .. } => write!(
                f,
                "    * known good (backtracking): {}.\n    * known bad (backtracking): {}.",
                set(good),
                set(bad)
            ),
            TraceEvent::Neighbour { x, y, neighbour: true, .. } => {
                write!(f, "    > node {y} is still a neighbour of {x} .")
            }
            TraceEvent::Neighbour { x, y, dsep, .. } => write!(
                f,
                "    > node {y} is not a neighbour of {x} . ( d-separating set: {} )",
                set(dsep.as_deref().unwrap_or(&[]))
            ),
            TraceEvent::VStructure { left, center, right, p_value, applied } => {
                let verb = if *applied { "applying" } else { "skipping" };
                write!(f, "* {verb} v-structure {left} -> {center} <- {right} ( {p_value:e} )")
            }
            TraceEvent::Step { description, delta, score } => {
                write!(f, "  > {description} (delta {delta:.6}, score {score:.6})")
            }
            TraceEvent::Note(s) => write!(f, "  {s}"),
        }
    }
}

impl TraceEvent {
    /// Tab-separated record: kind followed by its fields, sets comma-joined.
    pub fn record(&self) -> String {
        let j = |v: &[String]| v.join(",");
        match self {
            TraceEvent::Phase(s) => format!("phase\t{s}"),
            TraceEvent::Test { x, y, z, statistic, p_value } => {
                format!("test\t{x}\t{y}\t{}\t{statistic:e}\t{p_value:e}", j(z))
            }
            TraceEvent::Included { target, node, p_value, now } => {
                format!("include\t{target}\t{node}\t{p_value:e}\t{}", j(now))
            }
            TraceEvent::Excluded { target, node, p_value } => format!("exclude\t{target}\t{node}\t{p_value:e}"),
            TraceEvent::Backtrack { target, good, bad } => format!("backtrack\t{target}\t{}\t{}", j(good), j(bad)),
            TraceEvent::Neighbour { x, y, neighbour, dsep } => format!(
                "neighbour\t{x}\t{y}\t{neighbour}\t{}",
                dsep.as_deref().map(j).unwrap_or_default()
            ),
            TraceEvent::VStructure { left, center, right, p_value, applied } => {
                format!("vstructure\t{left}\t{center}\t{right}\t{p_value:e}\t{applied}")
            }
            TraceEvent::Step { description, delta, score } => format!("step\t{description}\t{delta:e}\t{score:e}"),
            TraceEvent::Note(s) => format!("note\t{s}"),
        }
    }
}

/// Ordered events of a run plus the number of tests (conditional
/// independence tests, or score-delta evaluations for hill climbing).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LearnTrace {
    pub events: Vec<TraceEvent>,
    pub tests: usize,
}

impl LearnTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: TraceEvent) {
        if matches!(e, TraceEvent::Test { .. }) {
            self.tests += 1;
        }
        self.events.push(e);
    }

    pub fn extend(&mut self, events: impl IntoIterator<Item = TraceEvent>) {
        for e in events {
            self.push(e);
        }
    }

    /// Recorded conditional independence tests.
    pub fn test_events(&self) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(|e| matches!(e, TraceEvent::Test { .. }))
    }

    pub fn records(&self) -> Vec<String> {
        self.events.iter().map(TraceEvent::record).collect()
    }
}

impl fmt::Display for LearnTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            if matches!(e, TraceEvent::Phase(_)) {
                writeln!(f, "{}", "-".repeat(64))?;
            }
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_only_tests() {
        let mut t = LearnTrace::new();
        t.push(TraceEvent::Phase("learning markov blanket of A".into()));
        t.push(TraceEvent::Test { x: "A".into(), y: "B".into(), z: vec![], statistic: 3.0, p_value: 0.01 });
        t.push(TraceEvent::Note("done".into()));
        assert_eq!(t.tests, 1);
        assert_eq!(t.test_events().count(), 1);
        assert_eq!(t.records()[1], "test\tA\tB\t\t3e0\t1e-2");
        assert!(t.to_string().contains("* learning markov blanket of A ."));
    }
}
