use super::Graph;
use crate::data::{DataKind, Dataset};
use crate::error::{Error, Result};

/// Free parameters of the network: `(R_i - 1) * prod(R_parents)` per node for
/// discrete data, `|parents| + 2` per node for Gaussian data.
pub fn nparams(g: &Graph, d: &Dataset) -> Result<u64> {
    if !g.is_directed() {
        return Err(Error::NotDirected);
    }
    if g.len() != d.n_cols() {
        return Err(Error::NodeMismatch);
    }
    let column: Vec<usize> = g.nodes().iter().map(|n| d.index_of(n)).collect::<Result<_>>()?;
    let mut total = 0u64;
    for i in 0..g.len() {
        let parents = g.parents_of(i);
        total += match d.kind() {
            DataKind::Discrete => {
                let configs: u64 = parents.iter().map(|&p| d.n_levels(column[p]) as u64).product();
                (d.n_levels(column[i]) as u64 - 1) * configs
            }
            DataKind::Continuous => parents.len() as u64 + 2,
        };
    }
    Ok(total)
}
