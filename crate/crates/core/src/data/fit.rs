//! Local distributions fitted to a DAG, and ancestral sampling from them.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Column, DataKind, Dataset};
use crate::error::{Error, Result};
use crate::graph::Graph;

const ROW_SUM_TOL: f64 = 1e-9;
const MIN_SD: f64 = 1e-9;

/// Local distribution of one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Local {
    /// One probability row per parent configuration. Configurations are
    /// numbered in mixed radix over `parents`, last parent varying fastest.
    Cpt {
        levels: Vec<String>,
        parents: Vec<String>,
        probs: Vec<Vec<f64>>,
    },
    /// `node = intercept + sum(coefficients * parents) + N(0, sd^2)`.
    Gaussian {
        parents: Vec<String>,
        intercept: f64,
        coefficients: Vec<f64>,
        sd: f64,
    },
}

impl Local {
    pub fn parents(&self) -> &[String] {
        match self {
            Local::Cpt { parents, .. } | Local::Gaussian { parents, .. } => parents,
        }
    }
}

/// A completely directed graph with one local distribution per node.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedNetwork {
    graph: Graph,
    locals: Vec<Local>,
}

#[derive(Serialize, Deserialize)]
struct NodeEntry {
    name: String,
    #[serde(flatten)]
    local: Local,
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    nodes: Vec<NodeEntry>,
}

impl FittedNetwork {
    /// Validates locals against the graph; `locals` follows node order.
    pub fn new(graph: Graph, locals: Vec<Local>) -> Result<Self> {
        if !graph.is_directed() {
            return Err(Error::NotDirected);
        }
        if locals.len() != graph.len() {
            return Err(Error::Data(format!(
                "{} local distributions for {} nodes",
                locals.len(),
                graph.len()
            )));
        }
        let discrete = matches!(locals.first(), Some(Local::Cpt { .. }));
        for (i, local) in locals.iter().enumerate() {
            let name = graph.label(i);
            let mut declared: Vec<usize> =
                local.parents().iter().map(|p| graph.index_of(p)).collect::<Result<_>>()?;
            declared.sort_unstable();
            if declared != graph.parents_of(i) {
                return Err(Error::Data(format!("parents of '{name}' do not match the graph")));
            }
            match local {
                Local::Cpt { levels, parents, probs } => {
                    if !discrete {
                        return Err(Error::MixedData);
                    }
                    if levels.len() < 2 {
                        return Err(Error::Data(format!("node '{name}' has fewer than two levels")));
                    }
                    let mut configs = 1usize;
                    for p in parents {
                        match &locals[graph.index_of(p)?] {
                            Local::Cpt { levels, .. } => configs *= levels.len(),
                            Local::Gaussian { .. } => return Err(Error::MixedData),
                        }
                    }
                    if probs.len() != configs {
                        return Err(Error::Data(format!(
                            "node '{name}' has {} probability rows, expected {configs}",
                            probs.len()
                        )));
                    }
                    for row in probs {
                        let sum: f64 = row.iter().sum();
                        if row.len() != levels.len()
                            || row.iter().any(|p| !(0.0..=1.0).contains(p))
                            || (sum - 1.0).abs() > ROW_SUM_TOL
                        {
                            return Err(Error::Data(format!("node '{name}' has an invalid probability row")));
                        }
                    }
                }
                Local::Gaussian { parents, coefficients, sd, intercept } => {
                    if discrete {
                        return Err(Error::MixedData);
                    }
                    if coefficients.len() != parents.len() {
                        return Err(Error::Data(format!("node '{name}' has a coefficient count mismatch")));
                    }
                    if *sd <= 0.0 || !sd.is_finite() || !intercept.is_finite() {
                        return Err(Error::Data(format!("node '{name}' needs a positive finite sd")));
                    }
                }
            }
        }
        Ok(FittedNetwork { graph, locals })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn locals(&self) -> &[Local] {
        &self.locals
    }

    pub fn local(&self, label: &str) -> Result<&Local> {
        Ok(&self.locals[self.graph.index_of(label)?])
    }

    pub fn kind(&self) -> DataKind {
        match self.locals.first() {
            Some(Local::Gaussian { .. }) => DataKind::Continuous,
            _ => DataKind::Discrete,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = NetworkFile {
            nodes: self
                .graph
                .nodes()
                .iter()
                .cloned()
                .zip(self.locals.iter().cloned())
                .map(|(name, local)| NodeEntry { name, local })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text)?;
        let mut graph = Graph::new(file.nodes.iter().map(|e| e.name.clone()))?;
        for (i, entry) in file.nodes.iter().enumerate() {
            for p in entry.local.parents() {
                let p = graph.index_of(p)?;
                graph.insert_directed(p, i)?;
            }
        }
        FittedNetwork::new(graph, file.nodes.into_iter().map(|e| e.local).collect())
    }

    /// Discrete network with CPT rows drawn from a symmetric Dirichlet of the
    /// given concentration, every cell raised to at least `min_prob`.
    /// `cardinalities` follows node order.
    pub fn random_discrete(
        graph: &Graph,
        cardinalities: &[usize],
        concentration: f64,
        min_prob: f64,
        seed: u64,
    ) -> Result<Self> {
        if cardinalities.len() != graph.len() || cardinalities.iter().any(|&c| c < 2) {
            return Err(Error::InvalidArgument("one cardinality of at least 2 per node".into()));
        }
        if cardinalities.iter().any(|&c| c as f64 * min_prob >= 1.0) {
            return Err(Error::InvalidArgument(format!("minimum probability {min_prob} too large")));
        }
        let gamma = Gamma::new(concentration, 1.0)
            .map_err(|e| Error::InvalidArgument(format!("concentration: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut locals = Vec::with_capacity(graph.len());
        for i in 0..graph.len() {
            let parents = graph.parents_of(i);
            let configs: usize = parents.iter().map(|&p| cardinalities[p]).product();
            let k = cardinalities[i];
            let probs = (0..configs)
                .map(|_| {
                    let draw: Vec<f64> = (0..k).map(|_| gamma.sample(&mut rng).max(1e-300)).collect();
                    clamp_row(draw, min_prob)
                })
                .collect();
            locals.push(Local::Cpt {
                levels: level_names(k),
                parents: parents.iter().map(|&p| graph.label(p).to_string()).collect(),
                probs,
            });
        }
        FittedNetwork::new(graph.clone(), locals)
    }
}

/// Normalizes a nonnegative row and lifts cells below `min_prob`.
fn clamp_row(mut row: Vec<f64>, min_prob: f64) -> Vec<f64> {
    for _ in 0..100 {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= sum);
        if row.iter().all(|&p| p >= min_prob - 1e-12) {
            break;
        }
        row.iter_mut().for_each(|p| *p = p.max(min_prob));
    }
    row
}

/// Level names `a`, `b`, ... (then `l26`, `l27`, ... past the alphabet).
pub(crate) fn level_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("l{i}")
            }
        })
        .collect()
}

fn parent_columns(g: &Graph, d: &Dataset) -> Result<Vec<usize>> {
    if !g.is_directed() {
        return Err(Error::NotDirected);
    }
    if g.len() != d.n_cols() {
        return Err(Error::NodeMismatch);
    }
    g.nodes().iter().map(|n| d.index_of(n)).collect()
}

/// Maximum-likelihood local distributions. Parent configurations never seen
/// in the data get a uniform row.
pub fn fit_mle(g: &Graph, d: &Dataset) -> Result<FittedNetwork> {
    let column = parent_columns(g, d)?;
    let n = d.n_rows();
    let mut locals = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let parents = g.parents_of(i);
        let parent_names: Vec<String> = parents.iter().map(|&p| g.label(p).to_string()).collect();
        let ci = column[i];
        match d.kind() {
            DataKind::Discrete => {
                let k = d.n_levels(ci);
                let radices: Vec<usize> = parents.iter().map(|&p| d.n_levels(column[p])).collect();
                let configs: usize = radices.iter().product();
                let mut counts = vec![vec![0u64; k]; configs];
                for row in 0..n {
                    let mut cfg = 0usize;
                    for (&p, &r) in parents.iter().zip(&radices) {
                        cfg = cfg * r + d.codes(column[p])[row] as usize;
                    }
                    counts[cfg][d.codes(ci)[row] as usize] += 1;
                }
                let probs = counts
                    .into_iter()
                    .map(|row| {
                        let total: u64 = row.iter().sum();
                        if total == 0 {
                            vec![1.0 / k as f64; k]
                        } else {
                            row.iter().map(|&c| c as f64 / total as f64).collect()
                        }
                    })
                    .collect();
                locals.push(Local::Cpt { levels: d.levels(ci).to_vec(), parents: parent_names, probs });
            }
            DataKind::Continuous => {
                let p = parents.len();
                let design = DMatrix::from_fn(n, p + 1, |r, c| {
                    if c == 0 {
                        1.0
                    } else {
                        d.values(column[parents[c - 1]])[r]
                    }
                });
                let y = DVector::from_column_slice(d.values(ci));
                let beta = design
                    .clone()
                    .svd(true, true)
                    .solve(&y, 1e-12)
                    .map_err(|e| Error::Data(format!("least squares for '{}': {e}", g.label(i))))?;
                let resid = &y - &design * &beta;
                let sd = (resid.norm_squared() / n as f64).sqrt().max(MIN_SD);
                locals.push(Local::Gaussian {
                    parents: parent_names,
                    intercept: beta[0],
                    coefficients: beta.iter().skip(1).copied().collect(),
                    sd,
                });
            }
        }
    }
    FittedNetwork::new(g.clone(), locals)
}

/// Ancestral sampling in topological order; identical output for identical
/// seeds. Columns follow the network's node order.
pub fn forward_sample(f: &FittedNetwork, n: usize, seed: u64) -> Result<Dataset> {
    let g = &f.graph;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codes: Vec<Vec<u32>> = vec![Vec::new(); g.len()];
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); g.len()];
    for v in g.topological_order()? {
        match &f.locals[v] {
            Local::Cpt { parents, probs, levels } => {
                let pidx: Vec<usize> = parents.iter().map(|p| g.index_of(p)).collect::<Result<_>>()?;
                let radices: Vec<usize> = pidx
                    .iter()
                    .map(|&p| match &f.locals[p] {
                        Local::Cpt { levels, .. } => levels.len(),
                        Local::Gaussian { .. } => 0,
                    })
                    .collect();
                let mut col = Vec::with_capacity(n);
                for row in 0..n {
                    let mut cfg = 0usize;
                    for (&p, &r) in pidx.iter().zip(&radices) {
                        cfg = cfg * r + codes[p][row] as usize;
                    }
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let mut pick = levels.len() - 1;
                    for (level, &p) in probs[cfg].iter().enumerate() {
                        acc += p;
                        if u < acc {
                            pick = level;
                            break;
                        }
                    }
                    col.push(pick as u32);
                }
                codes[v] = col;
            }
            Local::Gaussian { parents, intercept, coefficients, sd } => {
                let pidx: Vec<usize> = parents.iter().map(|p| g.index_of(p)).collect::<Result<_>>()?;
                let mut col = Vec::with_capacity(n);
                for row in 0..n {
                    let mean = intercept
                        + pidx.iter().zip(coefficients).map(|(&p, c)| c * values[p][row]).sum::<f64>();
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    col.push(mean + sd * eps);
                }
                values[v] = col;
            }
        }
    }
    let columns = f
        .locals
        .iter()
        .enumerate()
        .map(|(i, local)| match local {
            Local::Cpt { levels, .. } => Column::Categorical {
                levels: levels.clone(),
                codes: std::mem::take(&mut codes[i]),
            },
            Local::Gaussian { .. } => Column::Numeric(std::mem::take(&mut values[i])),
        })
        .collect();
    Dataset::new(g.nodes().to_vec(), columns)
}
