use std::collections::HashSet;

use super::{Algorithm, Ctx};
use crate::data::DataKind;
use crate::error::Result;
use crate::trace::TraceEvent;

/// All subsets of `items`, by increasing size and lexicographically within
/// a size.
pub(super) fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=items.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            let Some(pos) = (0..size).rev().find(|&p| idx[p] != p + items.len() - size) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

struct Candidate {
    node: usize,
    p: f64,
    statistic: f64,
}

// smallest p-value first, larger statistic on ties, then column order
fn strongest(mut cs: Vec<Candidate>) -> Vec<Candidate> {
    cs.sort_by(|a, b| {
        a.p.total_cmp(&b.p)
            .then(b.statistic.abs().total_cmp(&a.statistic.abs()))
            .then(a.node.cmp(&b.node))
    });
    cs
}

impl Ctx<'_> {
    pub(super) fn note(&self, log: &mut Vec<TraceEvent>, text: String) {
        if self.verbose {
            log.push(TraceEvent::Note(text));
        }
    }

    fn rank(&self, target: usize, outside: &[usize], mb: &[usize], log: &mut Vec<TraceEvent>) -> Result<Vec<Candidate>> {
        let mut cs = Vec::with_capacity(outside.len());
        for &c in outside {
            let r = self.test(target, c, mb, log)?;
            cs.push(Candidate { node: c, p: r.p_value, statistic: r.statistic });
        }
        Ok(strongest(cs))
    }

    fn include(&self, target: usize, node: usize, p: f64, mb: &mut Vec<usize>, log: &mut Vec<TraceEvent>) {
        mb.push(node);
        log.push(TraceEvent::Included {
            target: self.name(target),
            node: self.name(node),
            p_value: p,
            now: self.labels(mb),
        });
    }

    /// Removes members independent of the target given the rest of the
    /// blanket, one at a time. Returns whether anything was removed.
    fn shrink(&self, target: usize, mb: &mut Vec<usize>, good: &[usize], log: &mut Vec<TraceEvent>) -> Result<bool> {
        let mut removed = false;
        for m in mb.clone() {
            if good.contains(&m) {
                continue;
            }
            self.note(log, format!("* checking node {} for exclusion (shrinking phase).", self.name(m)));
            let rest: Vec<usize> = mb.iter().copied().filter(|&x| x != m).collect();
            let r = self.test(target, m, &rest, log)?;
            if r.p_value > self.alpha {
                mb.retain(|&x| x != m);
                removed = true;
                log.push(TraceEvent::Excluded { target: self.name(target), node: self.name(m), p_value: r.p_value });
            }
        }
        Ok(removed)
    }

    // whether testing against a candidate given `z` keeps at least five
    // observations per degree of freedom
    fn enough_data(&self, target: usize, candidate: usize, z: &[usize]) -> bool {
        let d = self.tester.data();
        let n = d.n_rows() as f64;
        match d.kind() {
            DataKind::Discrete => {
                let df = (d.n_levels(target) - 1) as f64
                    * (d.n_levels(candidate) - 1) as f64
                    * z.iter().map(|&v| d.n_levels(v) as f64).product::<f64>();
                n >= 5.0 * df
            }
            DataKind::Continuous => n >= 5.0 * (z.len() as f64 + 2.0),
        }
    }

    /// Markov blanket (or parents and children for mmpc) of `target`.
    pub(super) fn blanket(
        &self,
        algorithm: Algorithm,
        target: usize,
        good: &[usize],
        bad: &[usize],
        log: &mut Vec<TraceEvent>,
    ) -> Result<Vec<usize>> {
        let n = self.tester.data().n_cols();
        let candidates: Vec<usize> =
            (0..n).filter(|&c| c != target && !good.contains(&c) && !bad.contains(&c)).collect();
        if !good.is_empty() || !bad.is_empty() {
            log.push(TraceEvent::Backtrack {
                target: self.name(target),
                good: self.labels(good),
                bad: self.labels(bad),
            });
        }
        let mut mb = good.to_vec();
        match algorithm {
            Algorithm::Gs => self.grow_shrink(target, &candidates, &mut mb, good, log)?,
            Algorithm::Iamb => {
                self.iamb_grow(target, &candidates, &mut mb, good, false, log)?;
                self.shrink(target, &mut mb, good, log)?;
            }
            Algorithm::InterIamb => {
                self.iamb_grow(target, &candidates, &mut mb, good, true, log)?;
                self.shrink(target, &mut mb, good, log)?;
            }
            Algorithm::FastIamb => self.fast_iamb(target, &candidates, &mut mb, good, log)?,
            Algorithm::Mmpc => self.max_min(target, &candidates, &mut mb, good, log)?,
        }
        mb.sort_unstable();
        Ok(mb)
    }

    // Sweeps the candidates cyclically until each non-member has been
    // tested against the current blanket, then shrinks.
    fn grow_shrink(
        &self,
        target: usize,
        candidates: &[usize],
        mb: &mut Vec<usize>,
        good: &[usize],
        log: &mut Vec<TraceEvent>,
    ) -> Result<()> {
        let mut since_change = 0;
        let mut i = 0;
        while !candidates.is_empty() {
            let outside = candidates.iter().filter(|c| !mb.contains(c)).count();
            if since_change >= outside {
                break;
            }
            let c = candidates[i % candidates.len()];
            i += 1;
            if mb.contains(&c) {
                continue;
            }
            self.note(log, format!("* checking node {} for inclusion.", self.name(c)));
            let r = self.test(target, c, mb, log)?;
            if r.p_value <= self.alpha {
                self.include(target, c, r.p_value, mb, log);
                since_change = 0;
            } else {
                since_change += 1;
            }
        }
        self.shrink(target, mb, good, log)?;
        Ok(())
    }

    fn iamb_grow(
        &self,
        target: usize,
        candidates: &[usize],
        mb: &mut Vec<usize>,
        good: &[usize],
        interleave: bool,
        log: &mut Vec<TraceEvent>,
    ) -> Result<()> {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        loop {
            let outside: Vec<usize> = candidates.iter().copied().filter(|c| !mb.contains(c)).collect();
            let ranked = self.rank(target, &outside, mb, log)?;
            let Some(best) = ranked.first() else { break };
            if best.p > self.alpha {
                break;
            }
            self.include(target, best.node, best.p, mb, log);
            if interleave {
                self.shrink(target, mb, good, log)?;
                let mut state = mb.clone();
                state.sort_unstable();
                if !seen.insert(state) {
                    break;
                }
            }
        }
        Ok(())
    }

    fn fast_iamb(
        &self,
        target: usize,
        candidates: &[usize],
        mb: &mut Vec<usize>,
        good: &[usize],
        log: &mut Vec<TraceEvent>,
    ) -> Result<()> {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        loop {
            let outside: Vec<usize> = candidates.iter().copied().filter(|c| !mb.contains(c)).collect();
            let ranked = self.rank(target, &outside, mb, log)?;
            let mut added = false;
            for (k, c) in ranked.iter().enumerate() {
                if c.p > self.alpha || (k > 0 && !self.enough_data(target, c.node, mb)) {
                    break;
                }
                self.include(target, c.node, c.p, mb, log);
                added = true;
            }
            if !added {
                break;
            }
            self.shrink(target, mb, good, log)?;
            let mut state = mb.clone();
            state.sort_unstable();
            if !seen.insert(state) {
                break;
            }
        }
        Ok(())
    }

    // Parents and children by max-min association: each step adds the
    // candidate whose weakest association (1 - p over all subsets of the
    // current set) is strongest; candidates found independent given some
    // subset are dropped for good.
    fn max_min(
        &self,
        target: usize,
        candidates: &[usize],
        cpc: &mut Vec<usize>,
        good: &[usize],
        log: &mut Vec<TraceEvent>,
    ) -> Result<()> {
        // largest p-value seen so far for each live candidate
        let mut live: Vec<(usize, f64)> = Vec::new();
        for &c in candidates {
            let mut worst: f64 = 0.0;
            for s in subsets(cpc) {
                worst = worst.max(self.test(target, c, &s, log)?.p_value);
                if worst > self.alpha {
                    break;
                }
            }
            if worst <= self.alpha {
                live.push((c, worst));
            }
        }
        while !live.is_empty() {
            let (pos, _) = live
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.1 .0.cmp(&b.1 .0)))
                .expect("non-empty");
            let (node, p) = live.remove(pos);
            self.include(target, node, p, cpc, log);
            let mut next = Vec::with_capacity(live.len());
            for (c, mut worst) in live {
                let others: Vec<usize> = cpc.iter().copied().filter(|&x| x != node).collect();
                for mut s in subsets(&others) {
                    s.push(node);
                    worst = worst.max(self.test(target, c, &s, log)?.p_value);
                    if worst > self.alpha {
                        break;
                    }
                }
                if worst <= self.alpha {
                    next.push((c, worst));
                }
            }
            live = next;
        }
        for m in cpc.clone() {
            if good.contains(&m) {
                continue;
            }
            let others: Vec<usize> = cpc.iter().copied().filter(|&x| x != m).collect();
            for s in subsets(&others) {
                let r = self.test(target, m, &s, log)?;
                if r.p_value > self.alpha {
                    cpc.retain(|&x| x != m);
                    log.push(TraceEvent::Excluded { target: self.name(target), node: self.name(m), p_value: r.p_value });
                    break;
                }
            }
        }
        Ok(())
    }
}
