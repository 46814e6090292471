//! Conditional independence tests for discrete and Gaussian data, with
//! asymptotic and Monte Carlo permutation p-values.

mod discrete;
mod gaussian;
mod permutation;

pub use discrete::{aic_test, discrete_test, fmi_statistic, mi_discrete, x2_discrete};
pub use gaussian::gaussian_statistic;
pub use permutation::permutation_pvalue;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::data::{contingency, correlation, DataKind, Dataset};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestKind {
    Mi,
    McMi,
    X2,
    McX2,
    Fmi,
    Aict,
    Cor,
    McCor,
    Zf,
    McZf,
    MiG,
    McMiG,
}

impl TestKind {
    pub const ALL: [TestKind; 12] = [
        TestKind::Mi,
        TestKind::McMi,
        TestKind::X2,
        TestKind::McX2,
        TestKind::Fmi,
        TestKind::Aict,
        TestKind::Cor,
        TestKind::McCor,
        TestKind::Zf,
        TestKind::McZf,
        TestKind::MiG,
        TestKind::McMiG,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TestKind::Mi => "mi",
            TestKind::McMi => "mc-mi",
            TestKind::X2 => "x2",
            TestKind::McX2 => "mc-x2",
            TestKind::Fmi => "fmi",
            TestKind::Aict => "aict",
            TestKind::Cor => "cor",
            TestKind::McCor => "mc-cor",
            TestKind::Zf => "zf",
            TestKind::McZf => "mc-zf",
            TestKind::MiG => "mi-g",
            TestKind::McMiG => "mc-mi-g",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TestKind::Mi => "Mutual Information (discrete)",
            TestKind::McMi => "Mutual Information (discrete, Monte Carlo)",
            TestKind::X2 => "Pearson's X^2",
            TestKind::McX2 => "Pearson's X^2 (Monte Carlo)",
            TestKind::Fmi => "Fast Mutual Information (discrete)",
            TestKind::Aict => "AIC-like test (discrete)",
            TestKind::Cor => "Pearson's Linear Correlation",
            TestKind::McCor => "Pearson's Linear Correlation (Monte Carlo)",
            TestKind::Zf => "Fisher's Z",
            TestKind::McZf => "Fisher's Z (Monte Carlo)",
            TestKind::MiG => "Mutual Information (Gaussian)",
            TestKind::McMiG => "Mutual Information (Gaussian, Monte Carlo)",
        }
    }

    pub fn data_kind(self) -> DataKind {
        match self {
            TestKind::Mi | TestKind::McMi | TestKind::X2 | TestKind::McX2 | TestKind::Fmi | TestKind::Aict => {
                DataKind::Discrete
            }
            _ => DataKind::Continuous,
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(
            self,
            TestKind::McMi | TestKind::McX2 | TestKind::McCor | TestKind::McZf | TestKind::McMiG
        )
    }

    /// The asymptotic test whose statistic a Monte Carlo test permutes.
    pub fn parametric(self) -> TestKind {
        match self {
            TestKind::McMi => TestKind::Mi,
            TestKind::McX2 => TestKind::X2,
            TestKind::McCor => TestKind::Cor,
            TestKind::McZf => TestKind::Zf,
            TestKind::McMiG => TestKind::MiG,
            other => other,
        }
    }

    /// Default test for a data type.
    pub fn default_for(kind: DataKind) -> TestKind {
        match kind {
            DataKind::Discrete => TestKind::Mi,
            DataKind::Continuous => TestKind::Cor,
        }
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown test '{s}'")))
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of one conditional independence test.
///
/// `statistic` is the quantity compared against the reference
/// distribution: G² = 2n·MI for `mi`/`fmi`, X² for `x2`, MI for `aict`, the
/// t statistic for `cor`, Z for `zf` and 2n·MI_g for `mi-g`. Monte Carlo
/// tests report the statistic of their parametric counterpart.
#[derive(Clone, Debug, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Option<f64>,
    pub replicates: Option<usize>,
    pub p_value: f64,
    pub kind: TestKind,
    /// Set when |rho| = 1 made the statistic infinite (reported as ±f64::MAX).
    pub infinite: bool,
}

impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind.parametric() {
            TestKind::Cor => "t",
            other => other.label(),
        };
        write!(f, "{name} = {:.4}", self.statistic)?;
        if let Some(df) = self.df {
            write!(f, ", df = {df}")?;
        }
        if let Some(b) = self.replicates {
            write!(f, ", Monte Carlo samples = {b}")?;
        }
        write!(f, ", p-value = {:.4}", self.p_value)
    }
}

/// Test runner bound to one dataset, addressing variables by column index.
/// Caches the correlation matrix for Gaussian tests.
#[derive(Clone, Debug)]
pub struct CiTester<'a> {
    data: &'a Dataset,
    kind: TestKind,
    replicates: usize,
    seed: u64,
    corr: Option<DMatrix<f64>>,
}

impl<'a> CiTester<'a> {
    pub fn new(data: &'a Dataset, kind: TestKind, replicates: usize, seed: u64) -> Result<Self> {
        data.require(kind.data_kind(), kind.label())?;
        if kind.is_monte_carlo() && replicates == 0 {
            return Err(Error::InvalidArgument("Monte Carlo tests need at least one replicate".into()));
        }
        let corr = match kind.data_kind() {
            DataKind::Continuous => {
                let all: Vec<usize> = (0..data.n_cols()).collect();
                Some(correlation::correlation_by_index(data, &all)?)
            }
            DataKind::Discrete => None,
        };
        Ok(CiTester { data, kind, replicates, seed, corr })
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn test(&self, x: usize, y: usize, z: &[usize]) -> Result<TestResult> {
        let d = self.data;
        if self.kind.is_monte_carlo() {
            let seed = stream_seed(self.seed, d, x, y, z);
            return permutation::run(d, self.corr.as_ref(), x, y, z, self.kind, self.replicates, seed);
        }
        match self.kind.data_kind() {
            DataKind::Discrete => {
                let table = contingency::table_by_index(d, x, y, z);
                discrete_test(&table, self.kind)
            }
            DataKind::Continuous => {
                let rho = match &self.corr {
                    Some(c) => correlation::partial_from_correlation(c, x, y, z)?,
                    None => correlation::partial_by_index(d, x, y, z)?,
                };
                gaussian_statistic(rho, d.n_rows(), z.len(), self.kind)
            }
        }
    }
}

/// Tests `x` against `y` given `z`. Monte Carlo tests derive their
/// permutation stream from `seed` and the variable labels, so a given test
/// always reproduces the same p-value.
pub fn ci_test(
    d: &Dataset,
    x: &str,
    y: &str,
    z: &[String],
    kind: TestKind,
    replicates: usize,
    seed: u64,
) -> Result<TestResult> {
    let (xi, yi, zi) = contingency::check_triple(d, x, y, z)?;
    CiTester::new(d, kind, replicates, seed)?.test(xi, yi, &zi)
}

// FNV-1a, stable across platforms and releases.
fn fnv(hash: &mut u64, bytes: &[u8]) {
    for &b in bytes {
        *hash ^= b as u64;
        *hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    *hash ^= 0xff;
    *hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
}

/// Seed of the permutation stream for one test, symmetric in x and y and
/// independent of the order of z.
pub(crate) fn stream_seed(seed: u64, d: &Dataset, x: usize, y: usize, z: &[usize]) -> u64 {
    let names = d.names();
    let (a, b) = if names[x] <= names[y] { (x, y) } else { (y, x) };
    let mut cond: Vec<&str> = z.iter().map(|&i| names[i].as_str()).collect();
    cond.sort_unstable();
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    fnv(&mut h, &seed.to_le_bytes());
    fnv(&mut h, names[a].as_bytes());
    fnv(&mut h, names[b].as_bytes());
    for c in cond {
        fnv(&mut h, c.as_bytes());
    }
    h
}
