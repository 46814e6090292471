//! Decomposable network scores.

mod delta;
mod discrete;
mod gaussian;

pub use delta::{score_delta, Move, MoveKind};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::data::{DataKind, Dataset};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    Lik,
    Loglik,
    Aic,
    Bic,
    Bde,
    K2,
    Bge,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 7] = [
        ScoreKind::Lik,
        ScoreKind::Loglik,
        ScoreKind::Aic,
        ScoreKind::Bic,
        ScoreKind::Bde,
        ScoreKind::K2,
        ScoreKind::Bge,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ScoreKind::Lik => "lik",
            ScoreKind::Loglik => "loglik",
            ScoreKind::Aic => "aic",
            ScoreKind::Bic => "bic",
            ScoreKind::Bde => "bde",
            ScoreKind::K2 => "k2",
            ScoreKind::Bge => "bge",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScoreKind::Lik => "Likelihood",
            ScoreKind::Loglik => "Log-Likelihood",
            ScoreKind::Aic => "Akaike Information Criterion",
            ScoreKind::Bic => "Bayesian Information Criterion",
            ScoreKind::Bde => "Bayesian Dirichlet (BDe)",
            ScoreKind::K2 => "Cooper & Herskovits' K2",
            ScoreKind::Bge => "Bayesian Gaussian (BGe)",
        }
    }

    /// Whether the score can be computed on data of the given type.
    pub fn supports(self, kind: DataKind) -> bool {
        match self {
            ScoreKind::Bde | ScoreKind::K2 => kind == DataKind::Discrete,
            ScoreKind::Bge => kind == DataKind::Continuous,
            _ => true,
        }
    }

    /// Equivalent DAGs get the same score; k2 is the exception.
    pub fn is_score_equivalent(self) -> bool {
        self != ScoreKind::K2
    }

    pub fn default_for(kind: DataKind) -> ScoreKind {
        match kind {
            DataKind::Discrete => ScoreKind::Bde,
            DataKind::Continuous => ScoreKind::Bge,
        }
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScoreKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown score '{s}'")))
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A score together with its tuning constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreSpec {
    pub kind: ScoreKind,
    /// Per-parameter penalty of aic and bic; defaults to 1 and ½·log n.
    pub penalty: Option<f64>,
    /// Equivalent sample size of bde and bge.
    pub iss: f64,
}

impl ScoreSpec {
    pub fn new(kind: ScoreKind) -> Self {
        ScoreSpec { kind, penalty: None, iss: 1.0 }
    }

    pub fn with_penalty(mut self, k: f64) -> Self {
        self.penalty = Some(k);
        self
    }

    pub fn with_iss(mut self, iss: f64) -> Self {
        self.iss = iss;
        self
    }

    /// The penalty coefficient used for a sample of size `n`; 0 for scores
    /// without a penalty term.
    pub fn penalty_for(&self, n: usize) -> f64 {
        match self.kind {
            ScoreKind::Aic => self.penalty.unwrap_or(1.0),
            ScoreKind::Bic => self.penalty.unwrap_or(0.5 * (n as f64).ln()),
            _ => 0.0,
        }
    }

    pub fn validate(&self, d: &Dataset) -> Result<()> {
        if !self.kind.supports(d.kind()) {
            let needed = if d.kind() == DataKind::Discrete { "continuous" } else { "discrete" };
            return Err(Error::DataType(format!("score '{}'", self.kind), needed));
        }
        if !(self.iss > 0.0 && self.iss.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "equivalent sample size must be positive, got {}",
                self.iss
            )));
        }
        if let Some(k) = self.penalty {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidArgument(format!("penalty must be non-negative, got {k}")));
            }
        }
        if d.n_rows() == 0 {
            return Err(Error::Data("cannot score an empty dataset".into()));
        }
        Ok(())
    }
}

/// Local score evaluator with a cache keyed by (node, sorted parent set).
/// Safe to share between threads; concurrent misses on the same key both
/// compute the same value.
pub struct LocalScorer<'a> {
    data: &'a Dataset,
    spec: ScoreSpec,
    gaussian: Option<gaussian::Moments>,
    cache: Mutex<HashMap<(usize, Vec<usize>), f64>>,
    caching: bool,
}

impl<'a> LocalScorer<'a> {
    pub fn new(data: &'a Dataset, spec: ScoreSpec) -> Result<Self> {
        spec.validate(data)?;
        let gaussian = match data.kind() {
            DataKind::Continuous => Some(gaussian::Moments::new(data)),
            DataKind::Discrete => None,
        };
        Ok(LocalScorer { data, spec, gaussian, cache: Mutex::new(HashMap::new()), caching: true })
    }

    /// Turns the cache off (every lookup recomputes) or back on.
    pub fn with_caching(mut self, on: bool) -> Self {
        self.caching = on;
        self
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn spec(&self) -> &ScoreSpec {
        &self.spec
    }

    /// Number of cached local scores.
    pub fn cached(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }

    /// Local score of column `node` given parent columns, in log form.
    pub fn local(&self, node: usize, parents: &[usize]) -> Result<f64> {
        if parents.contains(&node) {
            return Err(Error::InvalidArgument(format!(
                "'{}' cannot be its own parent",
                self.data.names()[node]
            )));
        }
        let mut key = parents.to_vec();
        key.sort_unstable();
        key.dedup();
        if !self.caching {
            return self.compute(node, &key);
        }
        let key = (node, key);
        if let Some(&v) = self.cache.lock().expect("score cache poisoned").get(&key) {
            return Ok(v);
        }
        let v = self.compute(node, &key.1)?;
        self.cache.lock().expect("score cache poisoned").insert(key, v);
        Ok(v)
    }

    fn compute(&self, node: usize, parents: &[usize]) -> Result<f64> {
        let d = self.data;
        let n = d.n_rows();
        let k = self.spec.penalty_for(n);
        match &self.gaussian {
            None => {
                let counts = discrete::Counts::new(d, node, parents);
                Ok(match self.spec.kind {
                    ScoreKind::Lik | ScoreKind::Loglik => counts.loglik(),
                    ScoreKind::Aic | ScoreKind::Bic => counts.loglik() - k * counts.nparams(),
                    ScoreKind::Bde => counts.bde(self.spec.iss),
                    ScoreKind::K2 => counts.k2(),
                    ScoreKind::Bge => unreachable!("validated against the data type"),
                })
            }
            Some(m) => Ok(match self.spec.kind {
                ScoreKind::Lik | ScoreKind::Loglik => m.loglik(node, parents)?,
                ScoreKind::Aic | ScoreKind::Bic => {
                    m.loglik(node, parents)? - k * (parents.len() as f64 + 2.0)
                }
                ScoreKind::Bge => m.bge(node, parents, self.spec.iss)?,
                ScoreKind::Bde | ScoreKind::K2 => unreachable!("validated against the data type"),
            }),
        }
    }

    /// Column index of node `i` of `g`.
    pub(crate) fn column_of(&self, g: &Graph, i: usize) -> Result<usize> {
        self.data.index_of(g.label(i))
    }

    /// Local score of node `i` of `g` under its parents in `g`.
    pub fn local_in(&self, g: &Graph, i: usize) -> Result<f64> {
        let parents = g
            .parents_of(i)
            .into_iter()
            .map(|p| self.column_of(g, p))
            .collect::<Result<Vec<_>>>()?;
        self.local(self.column_of(g, i)?, &parents)
    }

    /// Sum of the local scores of a DAG, in log form for every score.
    pub fn total(&self, g: &Graph) -> Result<f64> {
        check_graph(g, self.data)?;
        (0..g.len()).map(|i| self.local_in(g, i)).sum()
    }
}

fn check_graph(g: &Graph, d: &Dataset) -> Result<()> {
    if !g.is_directed() {
        return Err(Error::NotDirected);
    }
    let mut a: Vec<&String> = g.nodes().iter().collect();
    let mut b: Vec<&String> = d.names().iter().collect();
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::NodeMismatch);
    }
    Ok(())
}

/// Local score of `node` given `parents`, in log form.
pub fn local_score(node: &str, parents: &[String], d: &Dataset, spec: &ScoreSpec) -> Result<f64> {
    let scorer = LocalScorer::new(d, *spec)?;
    let i = d.index_of(node)?;
    let ps = parents.iter().map(|p| d.index_of(p)).collect::<Result<Vec<_>>>()?;
    scorer.local(i, &ps)
}

/// Score of a DAG. Every score is returned in log form except `lik`, which
/// is the exponential of the log-likelihood and fails with an overflow error
/// when that is not representable as a positive finite number.
pub fn network_score(g: &Graph, d: &Dataset, spec: &ScoreSpec) -> Result<f64> {
    let total = LocalScorer::new(d, *spec)?.total(g)?;
    if spec.kind == ScoreKind::Lik {
        let v = total.exp();
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Overflow(format!(
                "likelihood exp({total:.4}) is not representable; use loglik"
            )));
        }
        return Ok(v);
    }
    Ok(total)
}
