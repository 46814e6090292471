use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::discrete::{discrete_test, mi_discrete, x2_discrete};
use super::gaussian::gaussian_statistic;
use super::{CiTester, TestKind, TestResult};
use crate::data::contingency::{check_triple, configurations, table_by_index, ContingencyTable};
use crate::data::correlation::partial_from_correlation;
use crate::data::{residuals, DataKind, Dataset};
use crate::error::{Error, Result};

/// Monte Carlo permutation test of `x` against `y` given `z` with `b`
/// replicates. Discrete data permute one variable within each observed
/// configuration of `z`; continuous data permute the residuals of one
/// variable regressed on `z`. p = (1 + #{s_b ≥ s_0}) / (1 + b).
pub fn permutation_pvalue(
    d: &Dataset,
    x: &str,
    y: &str,
    z: &[String],
    kind: TestKind,
    b: usize,
    seed: u64,
) -> Result<TestResult> {
    if !kind.is_monte_carlo() {
        return Err(Error::InvalidArgument(format!("'{kind}' is not a Monte Carlo test")));
    }
    let (xi, yi, zi) = check_triple(d, x, y, z)?;
    CiTester::new(d, kind, b, seed)?.test(xi, yi, &zi)
}

fn rng_for(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

// Replicates that tie with the observed statistic up to rounding count as
// at least as extreme.
fn as_extreme(sb: f64, s0: f64) -> bool {
    sb >= s0 - 1e-10 * (1.0 + s0.abs())
}

fn add_one(hits: usize, b: usize) -> f64 {
    (1 + hits) as f64 / (1 + b) as f64
}

pub(super) fn run(
    d: &Dataset,
    corr: Option<&DMatrix<f64>>,
    x: usize,
    y: usize,
    z: &[usize],
    kind: TestKind,
    b: usize,
    seed: u64,
) -> Result<TestResult> {
    if b == 0 {
        return Err(Error::InvalidArgument("Monte Carlo tests need at least one replicate".into()));
    }
    // permute the variable with the smaller label so that swapping x and y
    // reproduces the same test
    let (px, py) = if d.names()[x] <= d.names()[y] { (x, y) } else { (y, x) };
    match kind.data_kind() {
        DataKind::Discrete => discrete(d, px, py, z, kind, b, seed),
        DataKind::Continuous => continuous(d, corr, px, py, z, kind, b, seed),
    }
}

fn discrete(d: &Dataset, x: usize, y: usize, z: &[usize], kind: TestKind, b: usize, seed: u64) -> Result<TestResult> {
    let base = kind.parametric();
    let observed = discrete_test(&table_by_index(d, x, y, z), base)?;
    let n = d.n_rows() as f64;
    let stat = |t: &ContingencyTable| -> f64 {
        match base {
            TestKind::X2 => x2_discrete(t).unwrap_or(0.0),
            _ => 2.0 * n * mi_discrete(t).unwrap_or(0.0),
        }
    };

    let (ids, strata) = configurations(d, z);
    let mut order: Vec<usize> = (0..d.n_rows()).collect();
    order.sort_by_key(|&r| ids[r]);
    let xs: Vec<u32> = order.iter().map(|&r| d.codes(x)[r]).collect();
    let ys: Vec<u32> = order.iter().map(|&r| d.codes(y)[r]).collect();
    let ks: Vec<u32> = order.iter().map(|&r| ids[r]).collect();
    let mut bounds = vec![0usize];
    for i in 1..ks.len() {
        if ks[i] != ks[i - 1] {
            bounds.push(i);
        }
    }
    bounds.push(ks.len());
    let (rows, cols) = (d.n_levels(x), d.n_levels(y));

    let s0 = observed.statistic;
    let hits = (0..b)
        .into_par_iter()
        .filter(|&rep| {
            let mut rng = rng_for(seed, rep);
            let mut perm = xs.clone();
            for w in bounds.windows(2) {
                perm[w[0]..w[1]].shuffle(&mut rng);
            }
            let t = ContingencyTable::tabulate(rows, cols, &perm, &ys, &ks, strata);
            as_extreme(stat(&t), s0)
        })
        .count();
    Ok(TestResult { df: None, replicates: Some(b), p_value: add_one(hits, b), kind, ..observed })
}

#[allow(clippy::too_many_arguments)]
fn continuous(
    d: &Dataset,
    corr: Option<&DMatrix<f64>>,
    x: usize,
    y: usize,
    z: &[usize],
    kind: TestKind,
    b: usize,
    seed: u64,
) -> Result<TestResult> {
    let rho = match corr {
        Some(c) => partial_from_correlation(c, x, y, z)?,
        None => crate::data::correlation::partial_by_index(d, x, y, z)?,
    };
    let observed = gaussian_statistic(rho, d.n_rows(), z.len(), kind)?;

    let rx = residuals(d, x, z)?;
    let ry = residuals(d, y, z)?;
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let (nx, ny) = (norm(&rx), norm(&ry));
    let scale = |i: usize| norm(&residuals(d, i, &[]).unwrap_or_default());
    // an exact linear function of z has no residual variation to permute
    let degenerate = nx <= 1e-6 * scale(x) || ny <= 1e-6 * scale(y);

    let s0 = if degenerate { 0.0 } else { rho.abs() };
    let hits = if degenerate {
        b
    } else {
        (0..b)
            .into_par_iter()
            .filter(|&rep| {
                let mut rng = rng_for(seed, rep);
                let mut perm = rx.clone();
                perm.shuffle(&mut rng);
                let dot: f64 = perm.iter().zip(&ry).map(|(a, c)| a * c).sum();
                as_extreme((dot / (nx * ny)).abs(), s0)
            })
            .count()
    };
    Ok(TestResult { df: None, replicates: Some(b), p_value: add_one(hits, b), kind, ..observed })
}
