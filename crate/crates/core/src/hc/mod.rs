//! Hill-climbing search over DAGs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::priors::{normalize_priors, Constraints, PriorKnowledge};
use crate::score::{score_delta, LocalScorer, Move, MoveKind, ScoreSpec};
use crate::trace::{LearnTrace, TraceEvent};

#[derive(Clone, Debug)]
pub struct HillClimbConfig {
    pub score: ScoreSpec,
    pub priors: PriorKnowledge,
    /// Initial network; the empty graph when absent.
    pub start: Option<Graph>,
    pub restarts: usize,
    /// Random arc changes applied before each restart.
    pub perturb: usize,
    pub max_iterations: usize,
    /// Cache local scores.
    pub optimized: bool,
    pub seed: u64,
    pub debug: bool,
}

impl HillClimbConfig {
    pub fn new(score: ScoreSpec) -> Self {
        HillClimbConfig {
            score,
            priors: PriorKnowledge::default(),
            start: None,
            restarts: 0,
            perturb: 1,
            max_iterations: 10_000,
            optimized: true,
            seed: 0,
            debug: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts > 0 && self.perturb == 0 {
            return Err(Error::InvalidArgument("restarts need at least one perturbation".into()));
        }
        Ok(())
    }
}

/// Every legal single-arc move on a DAG in canonical order: additions,
/// then deletions, then reversals, each sorted by (from, to) label.
/// Whitelisted arcs are never deleted and never reversed out of their
/// forced direction; blacklisted arcs are never added or reversed into.
pub fn enumerate_moves(g: &Graph, cons: &Constraints) -> Vec<Move> {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.label(a).cmp(g.label(b)));
    let mut adds = Vec::new();
    let mut deletes = Vec::new();
    let mut reverses = Vec::new();
    for &a in &order {
        for &b in &order {
            if a == b {
                continue;
            }
            if g.has_arc(a, b) {
                if !cons.is_whitelisted(a, b) {
                    deletes.push(Move::new(MoveKind::Delete, a, b));
                }
                if cons.allows_arc(b, a) && !g.without_edge(a, b).has_directed_path(a, b) {
                    reverses.push(Move::new(MoveKind::Reverse, a, b));
                }
            } else if !g.adjacent(a, b) && cons.allows_arc(a, b) && !g.has_directed_path(b, a) {
                adds.push(Move::new(MoveKind::Add, a, b));
            }
        }
    }
    adds.extend(deletes);
    adds.extend(reverses);
    adds
}

/// Applies `k` uniformly random legal moves in sequence. The flag is false
/// when some step found no legal move, in which case the graph reached so
/// far is returned.
pub fn perturb_graph(g: &Graph, k: usize, cons: &Constraints, seed: u64) -> (Graph, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = g.clone();
    for _ in 0..k {
        let moves = enumerate_moves(&out, cons);
        if moves.is_empty() {
            return (out, false);
        }
        let mv = moves[rng.random_range(0..moves.len())];
        out = mv.apply(&out).expect("enumerated moves are legal");
    }
    (out, true)
}

// An arc a -> b is covered when pa(b) = pa(a) + a; reversing it gives an
// equivalent DAG.
fn is_covered(g: &Graph, a: usize, b: usize) -> bool {
    let mut pa = g.parents_of(a);
    pa.push(a);
    pa.sort_unstable();
    let mut pb = g.parents_of(b);
    pb.sort_unstable();
    pa == pb
}

fn tolerance(score: f64, rel: f64) -> f64 {
    rel * (1.0 + score.abs())
}

struct Climber<'a> {
    scorer: LocalScorer<'a>,
    cons: Constraints,
    equivalent: bool,
    max_iterations: usize,
}

impl Climber<'_> {
    // Greedy ascent from `g`; returns the local maximum and its score.
    fn climb(&self, mut g: Graph, trace: &mut LearnTrace) -> Result<(Graph, f64)> {
        let mut score = self.scorer.total(&g)?;
        for _ in 0..self.max_iterations {
            let moves = enumerate_moves(&g, &self.cons);
            trace.tests += moves.len();
            let deltas = moves
                .par_iter()
                .map(|mv| {
                    if self.equivalent && mv.kind == MoveKind::Reverse && is_covered(&g, mv.from, mv.to) {
                        Ok(0.0)
                    } else {
                        score_delta(&g, mv, &self.scorer)
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            let Some(best) = deltas.iter().copied().reduce(f64::max) else { break };
            if best <= tolerance(score, 1e-10) {
                break;
            }
            let cut = best - tolerance(score, 1e-9);
            let pick = deltas.iter().position(|&d| d >= cut).expect("the maximum qualifies");
            let mv = moves[pick];
            let description = mv.describe(&g);
            g = mv.apply(&g)?;
            score += deltas[pick];
            trace.push(TraceEvent::Step { description, delta: deltas[pick], score });
        }
        Ok((g, score))
    }
}

/// Hill climbing from the start graph (empty by default) with optional
/// random restarts. The returned graph's provenance records the number of
/// score-delta evaluations.
pub fn hill_climb(d: &Dataset, cfg: &HillClimbConfig) -> Result<(Graph, LearnTrace)> {
    cfg.validate()?;
    let cons = normalize_priors(&cfg.priors, d.names())?;
    let scorer = LocalScorer::new(d, cfg.score)?.with_caching(cfg.optimized);
    let climber = Climber {
        scorer,
        cons,
        equivalent: cfg.score.kind.is_score_equivalent(),
        max_iterations: cfg.max_iterations,
    };
    let start = initial_graph(d, cfg.start.as_ref(), &climber.cons)?;

    let mut trace = LearnTrace::new();
    trace.push(TraceEvent::Phase("starting from the initial network".into()));
    let (mut best, mut best_score) = climber.climb(start, &mut trace)?;
    for r in 0..cfg.restarts {
        let (perturbed, complete) = perturb_graph(&best, cfg.perturb, &climber.cons, restart_seed(cfg.seed, r));
        trace.push(TraceEvent::Phase(format!("restart {} of {}", r + 1, cfg.restarts)));
        if !complete {
            trace.push(TraceEvent::Note("no legal move left to perturb with".into()));
        }
        let (g, s) = climber.climb(perturbed, &mut trace)?;
        if s > best_score + tolerance(best_score, 1e-10) {
            best = g;
            best_score = s;
            trace.push(TraceEvent::Note(format!("new best network, score {s:.6}")));
        }
    }

    best.provenance.algorithm = Some("Hill-Climbing".into());
    best.provenance.criterion = Some(cfg.score.kind.description().to_string());
    let k = cfg.score.penalty_for(d.n_rows());
    best.provenance.penalty = (k > 0.0).then_some(k);
    best.provenance.tests = trace.tests;
    best.provenance.optimized = Some(cfg.optimized);
    if cfg.debug {
        eprint!("{trace}");
    }
    Ok((best, trace))
}

fn restart_seed(seed: u64, r: usize) -> u64 {
    // splitmix64 step, so nearby seeds give unrelated streams
    let mut z = seed.wrapping_add((r as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// The start graph in column order, with required arcs added.
fn initial_graph(d: &Dataset, start: Option<&Graph>, cons: &Constraints) -> Result<Graph> {
    let g = match start {
        Some(s) => {
            if !s.is_directed() {
                return Err(Error::NotDirected);
            }
            s.reordered(d.names()).map_err(|_| Error::NodeMismatch)?
        }
        None => Graph::new(d.names().iter())?,
    };
    for (a, b) in g.directed_arcs() {
        if !cons.allows_arc(a, b) {
            return Err(Error::PriorConflict(format!(
                "the start graph contains the blacklisted arc {} -> {}",
                g.label(a),
                g.label(b)
            )));
        }
    }
    let mut out = g;
    for (a, b) in cons.forced_arcs().collect::<Vec<_>>() {
        if !out.has_arc(a, b) {
            out = out.with_arc(a, b).map_err(|_| {
                Error::PriorConflict(format!("whitelisted arc {} -> {} closes a cycle", out.label(a), out.label(b)))
            })?;
        }
    }
    for (a, b) in cons.free_edges().collect::<Vec<_>>() {
        if !out.adjacent(a, b) {
            out = out.with_arc(a, b).or_else(|_| out.with_arc(b, a))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_modelstring;

    fn none(g: &Graph) -> Constraints {
        Constraints::none(g.nodes())
    }

    #[test]
    fn moves_on_small_graphs() {
        let empty = Graph::new(["A", "B", "C"]).unwrap();
        let moves = enumerate_moves(&empty, &none(&empty));
        assert_eq!(moves.len(), 6);
        assert!(moves.iter().all(|m| m.kind == MoveKind::Add));
        assert_eq!((moves[0].from, moves[0].to), (0, 1));

        let full = parse_modelstring("[A][B|A][C|A:B]", None).unwrap();
        assert_eq!(enumerate_moves(&full, &none(&full)).iter().filter(|m| m.kind == MoveKind::Add).count(), 0);

        let chain = parse_modelstring("[A][B|A][C|B]", None).unwrap();
        let moves = enumerate_moves(&chain, &none(&chain));
        let (a, c) = (chain.index_of("A").unwrap(), chain.index_of("C").unwrap());
        assert!(moves.contains(&Move::new(MoveKind::Add, a, c)));
        assert!(!moves.contains(&Move::new(MoveKind::Add, c, a)));
    }

    #[test]
    fn whitelisted_arcs_are_immune() {
        let g = parse_modelstring("[A][B|A][C]", None).unwrap();
        let p = PriorKnowledge::new(vec![("A".into(), "B".into())], vec![("C".into(), "A".into())]);
        let cons = normalize_priors(&p, g.nodes()).unwrap();
        let moves = enumerate_moves(&g, &cons);
        assert!(!moves.iter().any(|m| m.from == 0 && m.to == 1 && m.kind != MoveKind::Add));
        assert!(!moves.contains(&Move::new(MoveKind::Add, 2, 0)));
        assert!(moves.contains(&Move::new(MoveKind::Add, 0, 2)));
    }

    #[test]
    fn perturbation() {
        let g = Graph::new(["A", "B"]).unwrap();
        let (p, ok) = perturb_graph(&g, 1, &none(&g), 3);
        assert!(ok);
        assert_eq!(p.n_directed(), 1);
        assert_eq!(perturb_graph(&g, 1, &none(&g), 3).0, p);
        let all = PriorKnowledge::new(vec![], vec![("A".into(), "B".into()), ("B".into(), "A".into())]);
        let cons = normalize_priors(&all, g.nodes()).unwrap();
        let (same, ok) = perturb_graph(&g, 2, &cons, 1);
        assert!(!ok);
        assert_eq!(same, g);
    }

    #[test]
    fn covered_arcs() {
        let g = parse_modelstring("[A][B|A][C|A:B]", None).unwrap();
        assert!(is_covered(&g, 0, 1));
        assert!(is_covered(&g, 1, 2));
        assert!(!is_covered(&g, 0, 2));
    }
}
