use std::collections::BTreeMap;

use super::blanket::subsets;
use super::Ctx;
use crate::error::Result;
use crate::graph::Graph;
use crate::priors::Constraints;
use crate::trace::TraceEvent;

/// Separating sets keyed by (smaller, larger) column index.
pub(super) type Separators = BTreeMap<(usize, usize), Vec<usize>>;

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// AND rule: y stays in x's set only if x is in y's.
pub(super) fn symmetrize(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter()
        .enumerate()
        .map(|(x, s)| s.iter().copied().filter(|&y| sets[y].contains(&x)).collect())
        .collect()
}

/// Outcome of the neighbourhood search for one pair.
#[derive(Clone, Debug)]
pub(super) struct PairDecision {
    pub neighbour: bool,
    pub dsep: Option<Vec<usize>>,
}

impl Ctx<'_> {
    /// Decides whether `y` in mb(x) is adjacent to `x` by searching the
    /// subsets of the smaller of mb(x) \ y and mb(y) \ x (the latter on
    /// ties) for a separating set.
    pub(super) fn decide_pair(
        &self,
        x: usize,
        y: usize,
        blankets: &[Vec<usize>],
        cons: &Constraints,
        log: &mut Vec<TraceEvent>,
    ) -> Result<PairDecision> {
        if cons.requires_edge(x, y) {
            return Ok(PairDecision { neighbour: true, dsep: None });
        }
        if !cons.allows_edge(x, y) {
            return Ok(PairDecision { neighbour: false, dsep: None });
        }
        let from_x: Vec<usize> = blankets[x].iter().copied().filter(|&v| v != y).collect();
        let from_y: Vec<usize> = blankets[y].iter().copied().filter(|&v| v != x).collect();
        let base = if from_x.len() < from_y.len() { from_x } else { from_y };
        self.note(log, format!("* checking node {} for neighbourhood.", self.name(y)));
        self.note(log, format!("  > dsep.set = ' {} '", self.labels(&base).join(" ")));
        for s in subsets(&base) {
            let r = self.test(x, y, &s, log)?;
            if r.p_value > self.alpha {
                return Ok(PairDecision { neighbour: false, dsep: Some(s) });
            }
        }
        Ok(PairDecision { neighbour: true, dsep: None })
    }

    /// Neighbours of every node from symmetric blankets. With `reuse`, each
    /// unordered pair is decided once.
    pub(super) fn neighbourhoods(
        &self,
        blankets: &[Vec<usize>],
        cons: &Constraints,
        reuse: bool,
        log: &mut Vec<TraceEvent>,
    ) -> Result<(Vec<Vec<usize>>, Separators)> {
        let n = blankets.len();
        let mut decided: BTreeMap<(usize, usize), PairDecision> = BTreeMap::new();
        let mut nbrs = vec![Vec::new(); n];
        let mut seps = Separators::new();
        for x in 0..n {
            log.push(TraceEvent::Phase(format!("learning neighbourhood of {}", self.name(x))));
            let mut good = Vec::new();
            let mut bad = Vec::new();
            for &y in &blankets[x] {
                let k = key(x, y);
                let decision = match decided.get(&k).filter(|_| reuse) {
                    Some(d) => {
                        if d.neighbour {
                            good.push(y)
                        } else {
                            bad.push(y)
                        }
                        d.clone()
                    }
                    None => self.decide_pair(x, y, blankets, cons, log)?,
                };
                if !reuse || !decided.contains_key(&k) {
                    log.push(TraceEvent::Neighbour {
                        x: self.name(x),
                        y: self.name(y),
                        neighbour: decision.neighbour,
                        dsep: decision.dsep.as_ref().map(|s| self.labels(s)),
                    });
                }
                if decision.neighbour {
                    nbrs[x].push(y);
                } else if let Some(s) = &decision.dsep {
                    seps.entry(k).or_insert_with(|| s.clone());
                }
                decided.entry(k).or_insert(decision);
            }
            if !good.is_empty() || !bad.is_empty() {
                log.push(TraceEvent::Backtrack { target: self.name(x), good: self.labels(&good), bad: self.labels(&bad) });
            }
        }
        log.push(TraceEvent::Phase("checking consistency of neighbourhood sets".into()));
        Ok((symmetrize(&nbrs), seps))
    }

    /// Orients X -> W <- Y for unshielded triples whose recorded separating
    /// set excludes W and where X and Y are dependent given that set plus
    /// W. Candidates are applied by increasing p-value; one that would
    /// overwrite an orientation, break a prior or close a cycle is skipped.
    pub(super) fn orient_vstructures(
        &self,
        g: &Graph,
        seps: &Separators,
        cons: &Constraints,
        log: &mut Vec<TraceEvent>,
    ) -> Result<Graph> {
        let mut found: Vec<(f64, usize, usize, usize)> = Vec::new();
        for w in 0..g.len() {
            log.push(TraceEvent::Phase(format!("v-structures centered on {}", self.name(w))));
            let nbrs = g.neighbours_of(w);
            for (i, &x) in nbrs.iter().enumerate() {
                for &y in &nbrs[i + 1..] {
                    if g.adjacent(x, y) {
                        continue;
                    }
                    let Some(sep) = seps.get(&key(x, y)) else { continue };
                    if sep.contains(&w) {
                        continue;
                    }
                    let (l, r) = if self.name(x) < self.name(y) { (x, y) } else { (y, x) };
                    self.note(log, format!("* checking {} -> {} <- {}", self.name(l), self.name(w), self.name(r)));
                    let mut z = sep.clone();
                    z.push(w);
                    let t = self.test(l, r, &z, log)?;
                    if t.p_value <= self.alpha {
                        found.push((t.p_value, w, l, r));
                    }
                }
            }
        }
        found.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| self.name(a.1).cmp(&self.name(b.1)))
                .then_with(|| self.name(a.2).cmp(&self.name(b.2)))
                .then_with(|| self.name(a.3).cmp(&self.name(b.3)))
        });
        let mut out = g.clone();
        for (p, w, l, r) in found {
            let blocked = out.has_arc(w, l)
                || out.has_arc(w, r)
                || !cons.allows_arc(l, w)
                || !cons.allows_arc(r, w);
            let next = if blocked { None } else { out.with_arc(l, w).and_then(|h| h.with_arc(r, w)).ok() };
            log.push(TraceEvent::VStructure {
                left: self.name(l),
                center: self.name(w),
                right: self.name(r),
                p_value: p,
                applied: next.is_some(),
            });
            if let Some(h) = next {
                out = h;
            }
        }
        Ok(out)
    }
}
