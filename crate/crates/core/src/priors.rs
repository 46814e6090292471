//! Whitelists and blacklists of arcs.
//!
//! A pair listed in both directions in the whitelist must be adjacent with
//! either orientation; a single whitelisted arc A -> B is forced, which also
//! forbids B -> A and the undirected A - B. A blacklisted arc A -> B forbids
//! A -> B and A - B but leaves B -> A available; blacklisting both
//! directions removes the edge. Whitelisting wins over blacklisting.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{ArcList, Graph};

/// Arc lists as supplied by the user, by label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PriorKnowledge {
    pub whitelist: ArcList,
    pub blacklist: ArcList,
}

impl PriorKnowledge {
    pub fn new(whitelist: ArcList, blacklist: ArcList) -> Self {
        PriorKnowledge { whitelist, blacklist }
    }

    pub fn is_empty(&self) -> bool {
        self.whitelist.is_empty() && self.blacklist.is_empty()
    }
}

/// Reads a two-column delimited arc file with a header row.
pub fn read_arc_file(path: impl AsRef<Path>) -> Result<ArcList> {
    let text = std::fs::read_to_string(path)?;
    parse_arcs(&text)
}

pub fn parse_arcs(text: &str) -> Result<ArcList> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Data("empty arc file".into()))?;
    let delim = [',', '\t', ';']
        .into_iter()
        .find(|c| header.contains(*c))
        .ok_or_else(|| Error::Data(format!("arc file header '{header}' has no delimiter")))?;
    let mut arcs = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(delim).map(|f| f.trim().trim_matches('"')).collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Data(format!("arc file row {} is not a from/to pair: '{line}'", i + 2)));
        }
        arcs.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(arcs)
}

/// Prior knowledge resolved against a node list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraints {
    nodes: Vec<String>,
    // directed arcs that may not appear
    banned: BTreeSet<(usize, usize)>,
    // every whitelisted arc, as given
    whitelisted: BTreeSet<(usize, usize)>,
}

/// Resolves user arc lists into the effective set of allowed, required and
/// forced arcs. Fails when the forced arcs alone contain a directed cycle.
pub fn normalize_priors<S: AsRef<str>>(p: &PriorKnowledge, nodes: &[S]) -> Result<Constraints> {
    let names: Vec<String> = nodes.iter().map(|s| s.as_ref().to_string()).collect();
    let lookup = |(a, b): &(String, String)| -> Result<(usize, usize)> {
        let find = |x: &String| {
            names.iter().position(|n| n == x).ok_or_else(|| Error::UnknownNode(x.clone()))
        };
        let (i, j) = (find(a)?, find(b)?);
        if i == j {
            return Err(Error::SelfLoop(a.clone()));
        }
        Ok((i, j))
    };
    let whitelisted: BTreeSet<(usize, usize)> = p.whitelist.iter().map(lookup).collect::<Result<_>>()?;
    let mut banned: BTreeSet<(usize, usize)> = p.blacklist.iter().map(lookup).collect::<Result<_>>()?;
    for &(a, b) in &whitelisted {
        if !whitelisted.contains(&(b, a)) {
            banned.insert((b, a));
        }
    }
    for arc in &whitelisted {
        banned.remove(arc);
    }
    let c = Constraints { nodes: names, banned, whitelisted };

    let mut forced = Graph::new(c.nodes.iter())?;
    for (a, b) in c.forced_arcs() {
        forced = forced.with_arc(a, b).map_err(|_| {
            Error::PriorConflict(format!(
                "the whitelisted arcs contain a cycle through {} -> {}",
                c.nodes[a], c.nodes[b]
            ))
        })?;
    }
    Ok(c)
}

impl Constraints {
    /// No prior knowledge over the given nodes.
    pub fn none<S: AsRef<str>>(nodes: &[S]) -> Self {
        Constraints {
            nodes: nodes.iter().map(|s| s.as_ref().to_string()).collect(),
            banned: BTreeSet::new(),
            whitelisted: BTreeSet::new(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.banned.is_empty() && self.whitelisted.is_empty()
    }

    /// Whether the directed arc a -> b may appear.
    pub fn allows_arc(&self, a: usize, b: usize) -> bool {
        !self.banned.contains(&(a, b))
    }

    /// Whether a and b may be joined by an undirected edge.
    pub fn allows_undirected(&self, a: usize, b: usize) -> bool {
        self.allows_arc(a, b) && self.allows_arc(b, a)
    }

    /// Whether a and b may be adjacent at all.
    pub fn allows_edge(&self, a: usize, b: usize) -> bool {
        self.allows_arc(a, b) || self.allows_arc(b, a)
    }

    /// Whether the edge between a and b must be present.
    pub fn requires_edge(&self, a: usize, b: usize) -> bool {
        self.whitelisted.contains(&(a, b)) || self.whitelisted.contains(&(b, a))
    }

    pub fn is_whitelisted(&self, a: usize, b: usize) -> bool {
        self.whitelisted.contains(&(a, b))
    }

    /// Whitelisted arcs whose reverse is not whitelisted.
    pub fn forced_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.whitelisted.iter().copied().filter(|&(a, b)| !self.whitelisted.contains(&(b, a)))
    }

    /// Unordered pairs whitelisted in both directions, smaller index first.
    pub fn free_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.whitelisted.iter().copied().filter(|&(a, b)| a < b && self.whitelisted.contains(&(b, a)))
    }

    /// Nodes that may not be adjacent to `x`.
    pub fn excluded_for(&self, x: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&y| y != x && !self.allows_edge(x, y)).collect()
    }

    /// Nodes that must be adjacent to `x`.
    pub fn required_for(&self, x: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&y| y != x && self.requires_edge(x, y)).collect()
    }

    // position in `g` of each constrained node
    fn positions(&self, g: &Graph) -> Result<Vec<usize>> {
        if g.len() != self.nodes.len() {
            return Err(Error::NodeMismatch);
        }
        self.nodes.iter().map(|n| g.index_of(n).map_err(|_| Error::NodeMismatch)).collect()
    }

    fn conflict(&self, a: usize, b: usize) -> Error {
        Error::PriorConflict(format!(
            "whitelisted arc {} -> {} closes a cycle",
            self.nodes[a], self.nodes[b]
        ))
    }

    /// Orients undirected edges of `g` that only one direction is allowed
    /// for, forced arcs first. An orientation that would close a cycle
    /// removes the edge unless it is required.
    pub fn orient(&self, g: &Graph) -> Result<Graph> {
        let pos = self.positions(g)?;
        let mut one_way: Vec<(usize, usize)> = self.forced_arcs().collect();
        for a in 0..pos.len() {
            for b in a + 1..pos.len() {
                match (self.allows_arc(a, b), self.allows_arc(b, a)) {
                    (true, false) if !self.whitelisted.contains(&(a, b)) => one_way.push((a, b)),
                    (false, true) if !self.whitelisted.contains(&(b, a)) => one_way.push((b, a)),
                    _ => {}
                }
            }
        }
        let mut out = g.clone();
        for (a, b) in one_way {
            let (ga, gb) = (pos[a], pos[b]);
            if !out.has_undirected(ga, gb) {
                continue;
            }
            match out.with_arc(ga, gb) {
                Ok(next) => out = next,
                Err(Error::Cycle) if !self.requires_edge(a, b) => out = out.without_edge(ga, gb),
                Err(Error::Cycle) => return Err(self.conflict(a, b)),
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Makes a learned graph consistent with the constraints: forbidden
    /// edges are removed, arcs against their allowed direction are reversed
    /// (or removed when reversal closes a cycle), one-way edges are oriented
    /// and missing required edges are added.
    pub fn enforce(&self, g: &Graph) -> Result<Graph> {
        let pos = self.positions(g)?;
        let mut back = vec![0; pos.len()];
        for (i, &p) in pos.iter().enumerate() {
            back[p] = i;
        }
        let mut out = g.clone();
        for (a, b) in g.undirected_arcs() {
            if !self.allows_edge(back[a], back[b]) {
                out = out.without_edge(a, b);
            }
        }
        for (a, b) in g.directed_arcs() {
            if self.allows_arc(back[a], back[b]) {
                continue;
            }
            out = out.without_edge(a, b);
            if self.allows_arc(back[b], back[a]) {
                if let Ok(next) = out.with_arc(b, a) {
                    out = next;
                }
            }
        }
        out = self.orient(&out)?;
        for (a, b) in self.forced_arcs() {
            let (ga, gb) = (pos[a], pos[b]);
            if !out.has_arc(ga, gb) {
                out = out.without_edge(ga, gb).with_arc(ga, gb).map_err(|_| self.conflict(a, b))?;
            }
        }
        for (a, b) in self.free_edges() {
            if !out.adjacent(pos[a], pos[b]) {
                out = out.with_undirected(pos[a], pos[b])?;
            }
        }
        Ok(out)
    }

    /// Whether `g` satisfies every constraint.
    pub fn is_satisfied_by(&self, g: &Graph) -> bool {
        let Ok(pos) = self.positions(g) else {
            return false;
        };
        let mut back = vec![0; pos.len()];
        for (i, &p) in pos.iter().enumerate() {
            back[p] = i;
        }
        g.directed_arcs().all(|(a, b)| self.allows_arc(back[a], back[b]))
            && g.undirected_arcs().all(|(a, b)| self.allows_undirected(back[a], back[b]))
            && self.whitelisted.iter().all(|&(a, b)| g.adjacent(pos[a], pos[b]))
    }
}
