use super::{DataKind, Dataset};
use crate::error::{Error, Result};

/// Counts n_ijk over the levels of X (i), the levels of Y (j) and the
/// observed configurations of the conditioning set (k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    strata: usize,
    // (k * rows + i) * cols + j
    counts: Vec<u64>,
}

impl ContingencyTable {
    /// Builds a table from counts laid out as `[k][i][j]`.
    pub fn from_counts(rows: usize, cols: usize, strata: usize, counts: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 || strata == 0 || counts.len() != rows * cols * strata {
            return Err(Error::InvalidArgument(format!(
                "{} counts do not fill a {rows}x{cols}x{strata} table",
                counts.len()
            )));
        }
        Ok(ContingencyTable { rows, cols, strata, counts })
    }

    /// Two-way table from row-major nested counts.
    pub fn from_rows(rows: &[&[u64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let counts: Vec<u64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_counts(rows.len(), cols, 1, counts)
    }

    /// R, the number of levels of X.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// C, the number of levels of Y.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// L, the number of conditioning configurations.
    pub fn strata(&self) -> usize {
        self.strata
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.counts[(k * self.rows + i) * self.cols + j]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// n_{i+k}
    pub fn row_margin(&self, i: usize, k: usize) -> u64 {
        (0..self.cols).map(|j| self.get(i, j, k)).sum()
    }

    /// n_{+jk}
    pub fn col_margin(&self, j: usize, k: usize) -> u64 {
        (0..self.rows).map(|i| self.get(i, j, k)).sum()
    }

    /// n_{++k}
    pub fn stratum_total(&self, k: usize) -> u64 {
        let base = k * self.rows * self.cols;
        self.counts[base..base + self.rows * self.cols].iter().sum()
    }

    /// (R - 1)(C - 1)L
    pub fn df(&self) -> usize {
        (self.rows - 1) * (self.cols - 1) * self.strata
    }

    /// Margins of one stratum: (row sums, column sums, total).
    pub(crate) fn margins(&self, k: usize) -> (Vec<u64>, Vec<u64>, u64) {
        let mut rs = vec![0u64; self.rows];
        let mut cs = vec![0u64; self.cols];
        let base = k * self.rows * self.cols;
        let stratum = &self.counts[base..base + self.rows * self.cols];
        for (r, row) in rs.iter_mut().zip(stratum.chunks(self.cols)) {
            for (c, &v) in cs.iter_mut().zip(row) {
                *r += v;
                *c += v;
            }
        }
        let t = rs.iter().sum();
        (rs, cs, t)
    }

    pub(crate) fn tabulate(
        rows: usize,
        cols: usize,
        x: &[u32],
        y: &[u32],
        strata_ids: &[u32],
        strata: usize,
    ) -> Self {
        let mut counts = vec![0u64; rows * cols * strata];
        for ((&xi, &yi), &k) in x.iter().zip(y).zip(strata_ids) {
            counts[(k as usize * rows + xi as usize) * cols + yi as usize] += 1;
        }
        ContingencyTable { rows, cols, strata, counts }
    }
}

const DENSE_LIMIT: usize = 1 << 22;

/// Per-row configuration ids of the given categorical columns, compacted to
/// `0..count` over the configurations that actually occur (in ascending
/// mixed-radix order). An empty variable list yields one configuration.
pub fn configurations(d: &Dataset, vars: &[usize]) -> (Vec<u32>, usize) {
    let n = d.n_rows();
    let mut ids = vec![0u64; n];
    let mut radix: usize = 1;
    for &v in vars {
        let levels = d.n_levels(v);
        if radix.saturating_mul(levels) > DENSE_LIMIT {
            radix = compact(&mut ids, radix);
        }
        for (id, &code) in ids.iter_mut().zip(d.codes(v)) {
            *id = *id * levels as u64 + code as u64;
        }
        radix *= levels;
    }
    let count = compact(&mut ids, radix);
    (ids.into_iter().map(|v| v as u32).collect(), count)
}

// Relabels ids (all < radix) densely, preserving their order.
fn compact(ids: &mut [u64], radix: usize) -> usize {
    let mut map = vec![u32::MAX; radix];
    for &id in ids.iter() {
        map[id as usize] = 0;
    }
    let mut next = 0u32;
    for slot in map.iter_mut() {
        if *slot == 0 {
            *slot = next;
            next += 1;
        }
    }
    for id in ids.iter_mut() {
        *id = map[*id as usize] as u64;
    }
    next as usize
}

pub(crate) fn table_by_index(d: &Dataset, x: usize, y: usize, z: &[usize]) -> ContingencyTable {
    let (ids, strata) = configurations(d, z);
    ContingencyTable::tabulate(d.n_levels(x), d.n_levels(y), d.codes(x), d.codes(y), &ids, strata)
}

pub(crate) fn check_triple(d: &Dataset, x: &str, y: &str, z: &[String]) -> Result<(usize, usize, Vec<usize>)> {
    let xi = d.index_of(x)?;
    let yi = d.index_of(y)?;
    let zi = z.iter().map(|l| d.index_of(l)).collect::<Result<Vec<_>>>()?;
    let mut all = vec![xi, yi];
    all.extend(&zi);
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return Err(Error::InvalidArgument(format!(
            "variables must be distinct: {x}, {y} | {}",
            z.join(", ")
        )));
    }
    Ok((xi, yi, zi))
}

/// Contingency table of `x` and `y` over the observed configurations of `z`.
pub fn contingency_counts(d: &Dataset, x: &str, y: &str, z: &[String]) -> Result<ContingencyTable> {
    d.require(DataKind::Discrete, "contingency tables")?;
    let (xi, yi, zi) = check_triple(d, x, y, z)?;
    Ok(table_by_index(d, xi, yi, &zi))
}
