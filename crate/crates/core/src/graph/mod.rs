//! Partially directed acyclic graphs over labelled nodes.
//!
//! A [`Graph`] is a value: every mutation returns a new graph and leaves
//! the receiver untouched, so graphs can be shared freely between threads.
//! Nodes are addressed by their position in the node list; the label-based
//! helpers resolve labels to positions and report unknown labels.

mod compare;
mod dot;
mod modelstring;
mod params;
mod pdag;

pub use compare::{compare, Comparison, NodeDiff};
pub use dot::to_dot;
pub use modelstring::{format_modelstring, parse_modelstring};
pub use params::nparams;
pub use pdag::{cpdag, extend_pdag, extend_pdag_with_report, find_vstructures, Propagation, VStructure};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Display-only metadata describing how a graph was produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub algorithm: Option<String>,
    /// Test or score label.
    pub criterion: Option<String>,
    pub alpha: Option<f64>,
    pub penalty: Option<f64>,
    pub tests: usize,
    pub optimized: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Graph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    directed: BTreeSet<(usize, usize)>,
    // (a, b) with label(a) < label(b)
    undirected: BTreeSet<(usize, usize)>,
    pub provenance: Provenance,
}

/// Arc edit operations for [`Graph::mutate_arc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcOp {
    Set,
    Drop,
    Reverse,
}

/// Structural queries answered by [`Graph::query`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Query {
    Parents,
    Children,
    MarkovBlanket,
    Neighbourhood,
    RootNodes,
    LeafNodes,
    Amat,
    Arcs,
    DirectedArcs,
    UndirectedArcs,
    Acyclic,
    Directed,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryValue {
    Nodes(Vec<String>),
    Arcs(ArcList),
    Matrix(Vec<Vec<u8>>),
    Flag(bool),
}

/// Rows of (from, to) label pairs.
pub type ArcList = Vec<(String, String)>;

pub(crate) type ArcSet = BTreeSet<(String, String)>;

pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl Graph {
    /// Empty graph over the given labels.
    pub fn new<I, S>(nodes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, label) in nodes.iter().enumerate() {
            if !valid_label(label) {
                return Err(Error::InvalidLabel(label.clone()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateNode(label.clone()));
            }
        }
        Ok(Graph {
            nodes,
            index,
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
            provenance: Provenance::default(),
        })
    }

    /// Builds a graph from labelled directed and undirected arcs.
    pub fn from_arcs<S: AsRef<str>>(
        nodes: &[S],
        directed: &[(S, S)],
        undirected: &[(S, S)],
    ) -> Result<Self> {
        let mut g = Graph::new(nodes.iter().map(|s| s.as_ref().to_string()))?;
        for (a, b) in undirected {
            let (a, b) = (g.index_of(a.as_ref())?, g.index_of(b.as_ref())?);
            g.insert_undirected(a, b)?;
        }
        for (a, b) in directed {
            let (a, b) = (g.index_of(a.as_ref())?, g.index_of(b.as_ref())?);
            g.insert_directed(a, b)?;
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub(crate) fn canonical(&self, a: usize, b: usize) -> (usize, usize) {
        if self.nodes[a] <= self.nodes[b] {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.directed.contains(&(from, to))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&self.canonical(a, b))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a) || self.has_undirected(a, b)
    }

    /// Directed arcs as (from, to) node positions, in ascending order.
    pub fn directed_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed.iter().copied()
    }

    /// Undirected arcs, each reported once with the smaller label first.
    pub fn undirected_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.undirected.iter().copied()
    }

    pub fn n_directed(&self) -> usize {
        self.directed.len()
    }

    pub fn n_undirected(&self) -> usize {
        self.undirected.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    pub fn parents_of(&self, i: usize) -> Vec<usize> {
        self.directed
            .iter()
            .filter(|&&(_, to)| to == i)
            .map(|&(from, _)| from)
            .collect()
    }

    pub fn children_of(&self, i: usize) -> Vec<usize> {
        self.directed
            .range((i, 0)..(i + 1, 0))
            .map(|&(_, to)| to)
            .collect()
    }

    pub fn undirected_neighbours_of(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .undirected
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Parents, children and undirected neighbours.
    pub fn neighbours_of(&self, i: usize) -> Vec<usize> {
        let mut out: BTreeSet<usize> = self.parents_of(i).into_iter().collect();
        out.extend(self.children_of(i));
        out.extend(self.undirected_neighbours_of(i));
        out.into_iter().collect()
    }

    /// Neighbours plus the other parents of every child.
    pub fn markov_blanket_of(&self, i: usize) -> Vec<usize> {
        let mut out: BTreeSet<usize> = self.neighbours_of(i).into_iter().collect();
        for child in self.children_of(i) {
            out.extend(self.parents_of(child));
        }
        out.remove(&i);
        out.into_iter().collect()
    }

    pub fn is_directed(&self) -> bool {
        self.undirected.is_empty()
    }

    /// True when the directed part has no cycles. Always true for graphs
    /// built through this API.
    pub fn is_acyclic(&self) -> bool {
        self.topological_order_unchecked().len() == self.nodes.len()
    }

    /// Whether a directed path leads from `from` to `to`.
    pub fn has_directed_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for (_, w) in self.directed.range((v, 0)..(v + 1, 0)) {
                if *w == to {
                    return true;
                }
                if !seen[*w] {
                    seen[*w] = true;
                    stack.push(*w);
                }
            }
        }
        false
    }

    /// Kahn's algorithm over the directed arcs, breaking ties by label.
    /// Returns fewer than `len()` nodes when the directed part is cyclic.
    fn topological_order_unchecked(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        for &(_, to) in &self.directed {
            indegree[to] += 1;
        }
        let by_label = |v: &mut Vec<usize>| v.sort_by(|&a, &b| self.nodes[a].cmp(&self.nodes[b]));
        let mut layer: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        by_label(&mut layer);
        let mut order = Vec::with_capacity(n);
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &v in &layer {
                for (_, w) in self.directed.range((v, 0)..(v + 1, 0)) {
                    indegree[*w] -= 1;
                    if indegree[*w] == 0 {
                        next.push(*w);
                    }
                }
            }
            order.extend_from_slice(&layer);
            by_label(&mut next);
            layer = next;
        }
        order
    }

    /// Topological order of the directed part, generation by generation
    /// (roots first), label-sorted within each generation.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let order = self.topological_order_unchecked();
        if order.len() != self.nodes.len() {
            return Err(Error::Cycle);
        }
        Ok(order)
    }

    pub(crate) fn insert_directed(&mut self, from: usize, to: usize) -> Result<()> {
        if from == to {
            return Err(Error::SelfLoop(self.nodes[from].clone()));
        }
        if self.directed.contains(&(from, to)) {
            return Ok(());
        }
        if self.has_directed_path(to, from) {
            return Err(Error::Cycle);
        }
        let key = self.canonical(from, to);
        self.undirected.remove(&key);
        self.directed.remove(&(to, from));
        self.directed.insert((from, to));
        Ok(())
    }

    pub(crate) fn insert_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::SelfLoop(self.nodes[a].clone()));
        }
        self.directed.remove(&(a, b));
        self.directed.remove(&(b, a));
        let key = self.canonical(a, b);
        self.undirected.insert(key);
        Ok(())
    }

    pub(crate) fn remove_edge(&mut self, a: usize, b: usize) {
        self.directed.remove(&(a, b));
        self.directed.remove(&(b, a));
        let key = self.canonical(a, b);
        self.undirected.remove(&key);
    }

    /// Same nodes, no arcs.
    pub fn without_arcs(&self) -> Graph {
        Graph {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
            provenance: Provenance::default(),
        }
    }

    /// Index-based arc insertion returning a new graph.
    pub fn with_arc(&self, from: usize, to: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.insert_directed(from, to)?;
        Ok(g)
    }

    pub fn with_undirected(&self, a: usize, b: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.insert_undirected(a, b)?;
        Ok(g)
    }

    pub fn without_edge(&self, a: usize, b: usize) -> Graph {
        let mut g = self.clone();
        g.remove_edge(a, b);
        g
    }

    /// Sets, drops or reverses the arc between two labelled nodes.
    pub fn mutate_arc(&self, from: &str, to: &str, op: ArcOp) -> Result<Graph> {
        let (a, b) = (self.index_of(from)?, self.index_of(to)?);
        let mut g = self.clone();
        match op {
            ArcOp::Set => g.insert_directed(a, b)?,
            ArcOp::Drop => g.remove_edge(a, b),
            ArcOp::Reverse => {
                if !self.has_arc(a, b) {
                    return Err(Error::MissingArc(from.to_string(), to.to_string()));
                }
                g.directed.remove(&(a, b));
                g.insert_directed(b, a)?;
            }
        }
        Ok(g)
    }

    pub fn set_arc(&self, from: &str, to: &str) -> Result<Graph> {
        self.mutate_arc(from, to, ArcOp::Set)
    }

    pub fn drop_arc(&self, from: &str, to: &str) -> Result<Graph> {
        self.mutate_arc(from, to, ArcOp::Drop)
    }

    pub fn reverse_arc(&self, from: &str, to: &str) -> Result<Graph> {
        self.mutate_arc(from, to, ArcOp::Reverse)
    }

    fn labels(&self, idx: impl IntoIterator<Item = usize>) -> Vec<String> {
        idx.into_iter().map(|i| self.nodes[i].clone()).collect()
    }

    fn arc_rows(&self, arcs: impl IntoIterator<Item = (usize, usize)>) -> ArcList {
        arcs.into_iter()
            .map(|(a, b)| (self.nodes[a].clone(), self.nodes[b].clone()))
            .collect()
    }

    /// Directed arcs as labelled rows.
    pub fn directed_arc_list(&self) -> ArcList {
        self.arc_rows(self.directed_arcs())
    }

    /// Undirected arcs as labelled rows, listed in both orientations.
    pub fn undirected_arc_list(&self) -> ArcList {
        let mut rows = Vec::with_capacity(2 * self.undirected.len());
        for (a, b) in self.undirected_arcs() {
            rows.push((self.nodes[a].clone(), self.nodes[b].clone()));
            rows.push((self.nodes[b].clone(), self.nodes[a].clone()));
        }
        rows
    }

    /// All arcs, undirected ones in both orientations.
    pub fn arc_list(&self) -> ArcList {
        let mut rows = self.directed_arc_list();
        rows.extend(self.undirected_arc_list());
        rows
    }

    /// Rebuilds a graph from an arc list in which a pair present in both
    /// orientations denotes an undirected arc.
    pub fn from_arc_list<S: AsRef<str>>(nodes: &[S], rows: &[(String, String)]) -> Result<Graph> {
        let mut g = Graph::new(nodes.iter().map(|s| s.as_ref().to_string()))?;
        let mut pairs = BTreeSet::new();
        for (a, b) in rows {
            pairs.insert((g.index_of(a)?, g.index_of(b)?));
        }
        for &(a, b) in &pairs {
            if pairs.contains(&(b, a)) {
                g.insert_undirected(a, b)?;
            }
        }
        for &(a, b) in &pairs {
            if !pairs.contains(&(b, a)) {
                g.insert_directed(a, b)?;
            }
        }
        Ok(g)
    }

    /// Adjacency matrix in node order; undirected arcs fill both entries.
    pub fn amat(&self) -> Vec<Vec<u8>> {
        let n = self.nodes.len();
        let mut m = vec![vec![0u8; n]; n];
        for &(a, b) in &self.directed {
            m[a][b] = 1;
        }
        for &(a, b) in &self.undirected {
            m[a][b] = 1;
            m[b][a] = 1;
        }
        m
    }

    pub fn root_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.parents_of(i).is_empty() && self.undirected_neighbours_of(i).is_empty())
            .collect()
    }

    pub fn leaf_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.children_of(i).is_empty() && self.undirected_neighbours_of(i).is_empty())
            .collect()
    }

    /// Answers a structural query; per-node kinds require `node`.
    pub fn query(&self, kind: Query, node: Option<&str>) -> Result<QueryValue> {
        let target = || -> Result<usize> {
            let label = node.ok_or_else(|| {
                Error::InvalidArgument(format!("query {kind:?} needs a node"))
            })?;
            self.index_of(label)
        };
        Ok(match kind {
            Query::Parents => QueryValue::Nodes(self.labels(self.parents_of(target()?))),
            Query::Children => QueryValue::Nodes(self.labels(self.children_of(target()?))),
            Query::MarkovBlanket => {
                QueryValue::Nodes(self.labels(self.markov_blanket_of(target()?)))
            }
            Query::Neighbourhood => QueryValue::Nodes(self.labels(self.neighbours_of(target()?))),
            Query::RootNodes => QueryValue::Nodes(self.labels(self.root_nodes())),
            Query::LeafNodes => QueryValue::Nodes(self.labels(self.leaf_nodes())),
            Query::Amat => QueryValue::Matrix(self.amat()),
            Query::Arcs => QueryValue::Arcs(self.arc_list()),
            Query::DirectedArcs => QueryValue::Arcs(self.directed_arc_list()),
            Query::UndirectedArcs => QueryValue::Arcs(self.undirected_arc_list()),
            Query::Acyclic => QueryValue::Flag(self.is_acyclic()),
            Query::Directed => QueryValue::Flag(self.is_directed()),
        })
    }

    pub fn average_markov_blanket_size(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        let total: usize = (0..self.len()).map(|i| self.markov_blanket_of(i).len()).sum();
        total as f64 / self.len() as f64
    }

    pub fn average_neighbourhood_size(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        2.0 * self.n_arcs() as f64 / self.len() as f64
    }

    /// Directed arcs per node.
    pub fn average_branching_factor(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        self.n_directed() as f64 / self.len() as f64
    }

    /// Labelled arcs as comparable sets, independent of node order.
    pub(crate) fn labelled_sets(&self) -> (ArcSet, ArcSet) {
        let d = self.directed_arc_list().into_iter().collect();
        let u = self
            .undirected_arcs()
            .map(|(a, b)| (self.nodes[a].clone(), self.nodes[b].clone()))
            .collect();
        (d, u)
    }

    /// Same structure with nodes listed in `order` (a permutation of the
    /// current labels).
    pub fn reordered<S: AsRef<str>>(&self, order: &[S]) -> Result<Graph> {
        let mut g = Graph::new(order.iter().map(|s| s.as_ref().to_string()))?;
        if g.len() != self.len() {
            return Err(Error::NodeMismatch);
        }
        for &(a, b) in &self.directed {
            let (x, y) = (g.index_of(&self.nodes[a])?, g.index_of(&self.nodes[b])?);
            g.directed.insert((x, y));
        }
        for &(a, b) in &self.undirected {
            let (x, y) = (g.index_of(&self.nodes[a])?, g.index_of(&self.nodes[b])?);
            let key = g.canonical(x, y);
            g.undirected.insert(key);
        }
        g.provenance = self.provenance.clone();
        Ok(g)
    }
}

/// Structural equality: same node labels and identical arc sets.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        let a: BTreeSet<&String> = self.nodes.iter().collect();
        let b: BTreeSet<&String> = other.nodes.iter().collect();
        a == b && self.labelled_sets() == other.labelled_sets()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_directed() {
            match format_modelstring(self) {
                Ok(s) => write!(f, "{s}"),
                Err(_) => write!(f, "[invalid graph]"),
            }
        } else {
            write!(f, "[partially directed graph]")
        }
    }
}
