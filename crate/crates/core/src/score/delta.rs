use std::fmt;

use super::LocalScorer;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Add,
    Delete,
    Reverse,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveKind::Add => "add",
            MoveKind::Delete => "delete",
            MoveKind::Reverse => "reverse",
        })
    }
}

/// A single-arc change to a DAG; `from` and `to` are node indices of the
/// graph the move applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub from: usize,
    pub to: usize,
}

impl Move {
    pub fn new(kind: MoveKind, from: usize, to: usize) -> Self {
        Move { kind, from, to }
    }

    /// Why the move cannot be applied to `g`, if it cannot.
    pub fn check(&self, g: &Graph) -> Result<()> {
        let (a, b) = (self.from, self.to);
        if a >= g.len() || b >= g.len() {
            return Err(Error::InvalidArgument("move refers to a node outside the graph".into()));
        }
        if a == b {
            return Err(Error::SelfLoop(g.label(a).to_string()));
        }
        match self.kind {
            MoveKind::Add => {
                if g.adjacent(a, b) {
                    return Err(Error::InvalidArgument(format!(
                        "{} and {} are already adjacent",
                        g.label(a),
                        g.label(b)
                    )));
                }
                if g.has_directed_path(b, a) {
                    return Err(Error::Cycle);
                }
            }
            MoveKind::Delete | MoveKind::Reverse => {
                if !g.has_arc(a, b) {
                    return Err(Error::MissingArc(g.label(a).into(), g.label(b).into()));
                }
                if self.kind == MoveKind::Reverse && g.without_edge(a, b).has_directed_path(a, b) {
                    return Err(Error::Cycle);
                }
            }
        }
        Ok(())
    }

    pub fn is_legal(&self, g: &Graph) -> bool {
        self.check(g).is_ok()
    }

    pub fn apply(&self, g: &Graph) -> Result<Graph> {
        self.check(g)?;
        match self.kind {
            MoveKind::Add => g.with_arc(self.from, self.to),
            MoveKind::Delete => Ok(g.without_edge(self.from, self.to)),
            MoveKind::Reverse => g.without_edge(self.from, self.to).with_arc(self.to, self.from),
        }
    }

    pub fn describe(&self, g: &Graph) -> String {
        format!("{} {} -> {}", self.kind, g.label(self.from), g.label(self.to))
    }
}

fn parents_with(
    scorer: &LocalScorer,
    g: &Graph,
    node: usize,
    add: Option<usize>,
    drop: Option<usize>,
) -> Result<Vec<usize>> {
    let mut ps: Vec<usize> = g.parents_of(node).into_iter().filter(|&p| Some(p) != drop).collect();
    ps.extend(add);
    ps.into_iter().map(|p| scorer.column_of(g, p)).collect()
}

fn change(scorer: &LocalScorer, g: &Graph, node: usize, add: Option<usize>, drop: Option<usize>) -> Result<f64> {
    let col = scorer.column_of(g, node)?;
    let before = scorer.local(col, &parents_with(scorer, g, node, None, None)?)?;
    let after = scorer.local(col, &parents_with(scorer, g, node, add, drop)?)?;
    Ok(after - before)
}

/// Score difference produced by a move, from at most two local rescorings
/// served through the scorer's cache.
pub fn score_delta(g: &Graph, mv: &Move, scorer: &LocalScorer) -> Result<f64> {
    mv.check(g)?;
    let (a, b) = (mv.from, mv.to);
    match mv.kind {
        MoveKind::Add => change(scorer, g, b, Some(a), None),
        MoveKind::Delete => change(scorer, g, b, None, Some(a)),
        MoveKind::Reverse => Ok(change(scorer, g, b, None, Some(a))? + change(scorer, g, a, Some(b), None)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, Dataset};
    use crate::graph::parse_modelstring;
    use crate::score::{ScoreKind, ScoreSpec};

    fn data() -> Dataset {
        let lv = vec!["a".to_string(), "b".to_string()];
        let a: Vec<u32> = (0..40).map(|i| (i % 2) as u32).collect();
        let b: Vec<u32> = (0..40).map(|i| ((i % 2) ^ (i % 7 == 0) as usize) as u32).collect();
        let c: Vec<u32> = (0..40).map(|i| ((i / 3) % 2) as u32).collect();
        Dataset::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                Column::Categorical { levels: lv.clone(), codes: a },
                Column::Categorical { levels: lv.clone(), codes: b },
                Column::Categorical { levels: lv, codes: c },
            ],
        )
        .unwrap()
    }

    #[test]
    fn legality() {
        let g = parse_modelstring("[A][B|A][C|B]", None).unwrap();
        assert!(Move::new(MoveKind::Add, 0, 2).is_legal(&g));
        assert_eq!(Move::new(MoveKind::Add, 2, 0).check(&g), Err(Error::Cycle));
        assert!(Move::new(MoveKind::Add, 1, 0).check(&g).is_err());
        assert!(Move::new(MoveKind::Reverse, 0, 1).is_legal(&g));
        let shortcut = g.with_arc(0, 2).unwrap();
        assert_eq!(Move::new(MoveKind::Reverse, 0, 2).check(&shortcut), Err(Error::Cycle));
        assert!(matches!(Move::new(MoveKind::Delete, 0, 2).check(&g), Err(Error::MissingArc(..))));
    }

    #[test]
    fn deltas_match_full_rescoring() {
        let d = data();
        for kind in [ScoreKind::Bde, ScoreKind::K2, ScoreKind::Bic] {
            let scorer = LocalScorer::new(&d, ScoreSpec::new(kind)).unwrap();
            let g = parse_modelstring("[A][B|A][C|B]", None).unwrap();
            for mv in [
                Move::new(MoveKind::Add, 0, 2),
                Move::new(MoveKind::Delete, 1, 2),
                Move::new(MoveKind::Reverse, 0, 1),
            ] {
                let delta = score_delta(&g, &mv, &scorer).unwrap();
                let full = scorer.total(&mv.apply(&g).unwrap()).unwrap() - scorer.total(&g).unwrap();
                assert!((delta - full).abs() < 1e-9, "{kind} {mv:?}");
            }
        }
    }
}
