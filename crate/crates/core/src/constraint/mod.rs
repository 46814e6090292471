//! Constraint-based structure learning: Markov blanket discovery,
//! neighbourhood search, v-structure orientation and direction propagation.

mod blanket;
mod skeleton;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::citest::{CiTester, TestKind, TestResult};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{extend_pdag, Graph};
use crate::priors::{normalize_priors, Constraints, PriorKnowledge};
use crate::trace::{LearnTrace, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Gs,
    Iamb,
    FastIamb,
    InterIamb,
    Mmpc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Gs, Algorithm::Iamb, Algorithm::FastIamb, Algorithm::InterIamb, Algorithm::Mmpc];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Gs => "gs",
            Algorithm::Iamb => "iamb",
            Algorithm::FastIamb => "fast-iamb",
            Algorithm::InterIamb => "inter-iamb",
            Algorithm::Mmpc => "mmpc",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Algorithm::Gs => "Grow-Shrink",
            Algorithm::Iamb => "Incremental Association",
            Algorithm::FastIamb => "Fast Incremental Association",
            Algorithm::InterIamb => "Interleaved Incremental Association",
            Algorithm::Mmpc => "Max-Min Parent Children",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm '{s}'")))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnConfig {
    pub algorithm: Algorithm,
    pub test: TestKind,
    pub alpha: f64,
    /// Permutations for Monte Carlo tests.
    pub replicates: usize,
    pub priors: PriorKnowledge,
    /// Reuse blanket and neighbourhood results of earlier nodes.
    pub optimized: bool,
    /// Worker threads for blanket learning; above 1 disables backtracking.
    pub parallelism: usize,
    /// Print the trace to standard error.
    pub debug: bool,
    pub seed: u64,
    /// Apply the AND rule to the parent-children sets found by mmpc.
    pub symmetric_mmpc: bool,
}

impl LearnConfig {
    pub fn new(algorithm: Algorithm, test: TestKind) -> Self {
        LearnConfig {
            algorithm,
            test,
            alpha: 0.05,
            replicates: 5000,
            priors: PriorKnowledge::default(),
            optimized: true,
            parallelism: 1,
            debug: false,
            seed: 0,
            symmetric_mmpc: true,
        }
    }

    /// Default configuration for a dataset: mi for discrete data, cor for
    /// continuous data.
    pub fn for_data(algorithm: Algorithm, d: &Dataset) -> Self {
        Self::new(algorithm, TestKind::default_for(d.kind()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.test.is_monte_carlo() && self.replicates == 0 {
            return Err(Error::InvalidArgument("Monte Carlo tests need at least one replicate".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidArgument("parallelism must be at least 1".into()));
        }
        Ok(())
    }

    fn backtracking(&self) -> bool {
        self.optimized && self.parallelism == 1
    }
}

/// Test runner shared by the learning phases.
pub(crate) struct Ctx<'a> {
    tester: CiTester<'a>,
    alpha: f64,
    // record the phrasing notes as well as the tests
    verbose: bool,
}

impl<'a> Ctx<'a> {
    fn new(d: &'a Dataset, cfg: &LearnConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Ctx {
            tester: CiTester::new(d, cfg.test, cfg.replicates, cfg.seed)?,
            alpha: cfg.alpha,
            verbose: cfg.debug,
        })
    }

    fn name(&self, i: usize) -> String {
        self.tester.data().names()[i].clone()
    }

    fn labels(&self, v: &[usize]) -> Vec<String> {
        v.iter().map(|&i| self.name(i)).collect()
    }

    fn test(&self, x: usize, y: usize, z: &[usize], log: &mut Vec<TraceEvent>) -> Result<TestResult> {
        let r = self.tester.test(x, y, z)?;
        log.push(TraceEvent::Test {
            x: self.name(x),
            y: self.name(y),
            z: self.labels(z),
            statistic: r.statistic,
            p_value: r.p_value,
        });
        Ok(r)
    }

    // Blankets of all nodes, seeded from earlier nodes when backtracking.
    fn all_blankets(
        &self,
        cfg: &LearnConfig,
        cons: &Constraints,
        trace: &mut LearnTrace,
    ) -> Result<Vec<Vec<usize>>> {
        let n = self.tester.data().n_cols();
        let heading = |x: usize| {
            let what = if cfg.algorithm == Algorithm::Mmpc { "parents and children" } else { "markov blanket" };
            TraceEvent::Phase(format!("learning {what} of {}", self.name(x)))
        };
        if cfg.backtracking() {
            let mut blankets: Vec<Vec<usize>> = Vec::with_capacity(n);
            for x in 0..n {
                let mut good = cons.required_for(x);
                let mut bad = Vec::new();
                for (y, mb) in blankets.iter().enumerate() {
                    if mb.contains(&x) {
                        if !good.contains(&y) {
                            good.push(y);
                        }
                    } else if !good.contains(&y) {
                        bad.push(y);
                    }
                }
                good.sort_unstable();
                let mut log = vec![heading(x)];
                let mb = self.blanket(cfg.algorithm, x, &good, &bad, &mut log)?;
                trace.extend(log);
                blankets.push(mb);
            }
            Ok(blankets)
        } else {
            let run = || {
                (0..n)
                    .into_par_iter()
                    .map(|x| {
                        let mut log = vec![heading(x)];
                        let good = cons.required_for(x);
                        self.blanket(cfg.algorithm, x, &good, &[], &mut log).map(|mb| (mb, log))
                    })
                    .collect::<Result<Vec<_>>>()
            };
            let results = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.parallelism)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
                .install(run)?;
            Ok(results
                .into_iter()
                .map(|(mb, log)| {
                    trace.extend(log);
                    mb
                })
                .collect())
        }
    }
}

/// Markov blanket of `target` (parents and children for mmpc). Members of
/// `known_good` start in the blanket and stay there; members of `known_bad`
/// are never tested.
pub fn learn_markov_blanket(
    target: &str,
    d: &Dataset,
    cfg: &LearnConfig,
    known_good: &[String],
    known_bad: &[String],
) -> Result<Vec<String>> {
    let ctx = Ctx::new(d, cfg)?;
    let t = d.index_of(target)?;
    let good = known_good.iter().map(|l| d.index_of(l)).collect::<Result<Vec<_>>>()?;
    let bad = known_bad.iter().map(|l| d.index_of(l)).collect::<Result<Vec<_>>>()?;
    if good.iter().any(|g| bad.contains(g) || *g == t) || bad.contains(&t) {
        return Err(Error::InvalidArgument("known good and known bad sets overlap".into()));
    }
    let mb = ctx.blanket(cfg.algorithm, t, &good, &bad, &mut Vec::new())?;
    Ok(ctx.labels(&mb))
}

/// Per-node label sets.
pub type NodeSets = BTreeMap<String, Vec<String>>;

/// AND-rule symmetrization: y stays in the set of x only if x is in the
/// set of y.
pub fn symmetry_correction(sets: &NodeSets) -> NodeSets {
    sets.iter()
        .map(|(x, s)| {
            let kept = s
                .iter()
                .filter(|y| sets.get(*y).is_some_and(|back| back.contains(x)))
                .cloned()
                .collect();
            (x.clone(), kept)
        })
        .collect()
}

fn blanket_indices(d: &Dataset, sets: &NodeSets) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); d.n_cols()];
    for (x, s) in sets {
        let i = d.index_of(x)?;
        out[i] = s.iter().map(|y| d.index_of(y)).collect::<Result<Vec<_>>>()?;
        out[i].sort_unstable();
    }
    Ok(out)
}

/// Neighbours of `x` among its Markov blanket and the separating set found
/// for each blanket member that is not a neighbour.
pub fn neighbourhood_from_mb(
    x: &str,
    blankets: &NodeSets,
    d: &Dataset,
    cfg: &LearnConfig,
) -> Result<(Vec<String>, NodeSets)> {
    let ctx = Ctx::new(d, cfg)?;
    let cons = normalize_priors(&cfg.priors, d.names())?;
    let mbs = blanket_indices(d, blankets)?;
    let xi = d.index_of(x)?;
    let mut nbrs = Vec::new();
    let mut seps = NodeSets::new();
    for &y in &mbs[xi] {
        let dec = ctx.decide_pair(xi, y, &mbs, &cons, &mut Vec::new())?;
        if dec.neighbour {
            nbrs.push(ctx.name(y));
        } else if let Some(s) = dec.dsep {
            seps.insert(ctx.name(y), ctx.labels(&s));
        }
    }
    Ok((nbrs, seps))
}

/// Separating sets keyed by label pairs (in either order).
pub type SeparatingSets = BTreeMap<(String, String), Vec<String>>;

/// Orients the v-structures of an undirected skeleton.
pub fn orient_vstructures(skeleton: &Graph, dsep: &SeparatingSets, d: &Dataset, cfg: &LearnConfig) -> Result<Graph> {
    let ctx = Ctx::new(d, cfg)?;
    let cons = normalize_priors(&cfg.priors, d.names())?;
    let g = skeleton.reordered(d.names())?;
    let mut seps = skeleton::Separators::new();
    for ((a, b), s) in dsep {
        let (i, j) = (d.index_of(a)?, d.index_of(b)?);
        let set = s.iter().map(|l| d.index_of(l)).collect::<Result<Vec<_>>>()?;
        seps.insert((i.min(j), i.max(j)), set);
    }
    ctx.orient_vstructures(&g, &seps, &cons, &mut Vec::new())
}

/// Full constraint-based pipeline.
pub fn constraint_learn(d: &Dataset, cfg: &LearnConfig) -> Result<(Graph, LearnTrace)> {
    let ctx = Ctx::new(d, cfg)?;
    let cons = normalize_priors(&cfg.priors, d.names())?;
    let mut trace = LearnTrace::new();

    let blankets = ctx.all_blankets(cfg, &cons, &mut trace)?;
    let mmpc = cfg.algorithm == Algorithm::Mmpc;
    let (nbrs, seps) = if mmpc {
        let sets = if cfg.symmetric_mmpc { skeleton::symmetrize(&blankets) } else { or_rule(&blankets) };
        (sets, skeleton::Separators::new())
    } else {
        trace.push(TraceEvent::Phase("checking consistency of markov blankets".into()));
        let sym = skeleton::symmetrize(&blankets);
        let mut log = Vec::new();
        let out = ctx.neighbourhoods(&sym, &cons, cfg.optimized, &mut log)?;
        trace.extend(log);
        out
    };

    let mut g = Graph::new(d.names().iter())?;
    for (x, ns) in nbrs.iter().enumerate() {
        for &y in ns {
            if x < y && cons.allows_edge(x, y) {
                g = g.with_undirected(x, y)?;
            }
        }
    }
    g = cons.orient(&g)?;
    if !mmpc {
        let mut log = Vec::new();
        g = ctx.orient_vstructures(&g, &seps, &cons, &mut log)?;
        trace.extend(log);
    }
    trace.push(TraceEvent::Phase("propagating directions for the undirected arcs".into()));
    g = extend_pdag(&g);
    g = extend_pdag(&cons.enforce(&g)?);

    g.provenance.algorithm = Some(cfg.algorithm.description().to_string());
    g.provenance.criterion = Some(cfg.test.description().to_string());
    g.provenance.alpha = Some(cfg.alpha);
    g.provenance.tests = trace.tests;
    g.provenance.optimized = Some(cfg.optimized);
    if cfg.debug {
        eprint!("{trace}");
    }
    Ok((g, trace))
}

// OR rule, used when mmpc symmetrization is turned off.
fn or_rule(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = sets.to_vec();
    for (x, s) in sets.iter().enumerate() {
        for &y in s {
            if !out[y].contains(&x) {
                out[y].push(x);
            }
        }
    }
    out
}
