use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::special::ln_mv_gamma;

/// Sample size and scatter matrix Σ (x − x̄)(x − x̄)ᵀ of all columns.
pub(super) struct Moments {
    n: f64,
    scatter: DMatrix<f64>,
}

impl Moments {
    pub(super) fn new(d: &Dataset) -> Self {
        let v = d.n_cols();
        let n = d.n_rows();
        let centred: Vec<Vec<f64>> = (0..v)
            .map(|i| {
                let x = d.values(i);
                let m = x.iter().sum::<f64>() / n as f64;
                x.iter().map(|a| a - m).collect()
            })
            .collect();
        let mut scatter = DMatrix::zeros(v, v);
        for a in 0..v {
            for b in a..v {
                let s: f64 = centred[a].iter().zip(&centred[b]).map(|(x, y)| x * y).sum();
                scatter[(a, b)] = s;
                scatter[(b, a)] = s;
            }
        }
        Moments { n: n as f64, scatter }
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.scatter[(rows[r], cols[c])])
    }

    /// Maximised Gaussian log-likelihood of a linear regression of `node`
    /// on `parents` with intercept.
    pub(super) fn loglik(&self, node: usize, parents: &[usize]) -> Result<f64> {
        let mut rss = self.scatter[(node, node)];
        if !parents.is_empty() {
            let spp = self.block(parents, parents);
            let spi = self.block(parents, &[node]);
            let chol = spp
                .cholesky()
                .ok_or_else(|| Error::Singular("the parents' covariance".into()))?;
            rss -= (spi.transpose() * chol.solve(&spi))[(0, 0)];
        }
        let var = (rss / self.n).max(1e-300);
        Ok(-0.5 * self.n * ((2.0 * PI * var).ln() + 1.0))
    }

    /// BGe local score: log p(D^{pa ∪ node}) − log p(D^{pa}).
    pub(super) fn bge(&self, node: usize, parents: &[usize], iss: f64) -> Result<f64> {
        let mut family = parents.to_vec();
        family.push(node);
        Ok(self.bge_marginal(&family, iss)? - self.bge_marginal(parents, iss)?)
    }

    /// Log marginal likelihood of the columns `y` under a normal-Wishart
    /// prior with mean equal to the sample mean, α_μ = iss, α_w = v + 2 and
    /// prior scale matrix t·I, t = α_μ(α_w − v − 1)/(α_μ + 1).
    fn bge_marginal(&self, y: &[usize], iss: f64) -> Result<f64> {
        let l = y.len();
        if l == 0 {
            return Ok(0.0);
        }
        let v = self.scatter.nrows() as f64;
        let n = self.n;
        let lf = l as f64;
        let alpha_w = v + 2.0;
        let t = iss * (alpha_w - v - 1.0) / (iss + 1.0);
        let mut r = self.block(y, y);
        for i in 0..l {
            r[(i, i)] += t;
        }
        let chol = r
            .cholesky()
            .ok_or_else(|| Error::Singular("the posterior scale matrix".into()))?;
        let log_det_r = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
        let a = (alpha_w - v + lf) / 2.0;
        let b = (n + alpha_w - v + lf) / 2.0;
        Ok(-(lf * n / 2.0) * PI.ln() + (lf / 2.0) * (iss / (iss + n)).ln() + ln_mv_gamma(l, b)
            - ln_mv_gamma(l, a)
            + a * lf * t.ln()
            - b * log_det_r)
    }
}
