use crate::data::{configurations, Dataset};
use crate::special::ln_gamma;

/// Counts n_jk of a node's levels (k) within each observed parent
/// configuration (j). Unobserved configurations contribute nothing to any
/// discrete score and are left out.
pub(super) struct Counts {
    levels: usize,
    // total number of parent configurations, observed or not
    configs: f64,
    counts: Vec<u64>,
}

impl Counts {
    pub(super) fn new(d: &Dataset, node: usize, parents: &[usize]) -> Self {
        let levels = d.n_levels(node);
        let (ids, observed) = configurations(d, parents);
        let mut counts = vec![0u64; observed * levels];
        for (&j, &k) in ids.iter().zip(d.codes(node)) {
            counts[j as usize * levels + k as usize] += 1;
        }
        let configs = parents.iter().map(|&p| d.n_levels(p) as f64).product();
        Counts { levels, configs, counts }
    }

    fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks(self.levels)
    }

    /// (R − 1) · Π R_p
    pub(super) fn nparams(&self) -> f64 {
        (self.levels as f64 - 1.0) * self.configs
    }

    pub(super) fn loglik(&self) -> f64 {
        let mut acc = 0.0;
        for row in self.rows() {
            let nj = row.iter().sum::<u64>() as f64;
            for &c in row {
                if c > 0 {
                    let c = c as f64;
                    acc += c * (c / nj).ln();
                }
            }
        }
        acc
    }

    /// Log marginal likelihood under a symmetric Dirichlet prior with cell
    /// weight iss / (R · q).
    pub(super) fn bde(&self, iss: f64) -> f64 {
        let a_j = iss / self.configs;
        let a_jk = a_j / self.levels as f64;
        let (lg_aj, lg_ajk) = (ln_gamma(a_j), ln_gamma(a_jk));
        let mut acc = 0.0;
        for row in self.rows() {
            let nj = row.iter().sum::<u64>() as f64;
            acc += lg_aj - ln_gamma(a_j + nj);
            for &c in row {
                if c > 0 {
                    acc += ln_gamma(a_jk + c as f64) - lg_ajk;
                }
            }
        }
        acc
    }

    /// Log of the K2 metric: Σ_j [log (R−1)! − log (n_j + R − 1)!] + Σ_jk log n_jk!.
    pub(super) fn k2(&self) -> f64 {
        let r = self.levels as f64;
        let lg_r = ln_gamma(r);
        let mut acc = 0.0;
        for row in self.rows() {
            let nj = row.iter().sum::<u64>() as f64;
            acc += lg_r - ln_gamma(nj + r);
            for &c in row {
                acc += ln_gamma(c as f64 + 1.0);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;

    fn data() -> Dataset {
        let lv = |k: usize| (0..k).map(|i| format!("l{i}")).collect::<Vec<_>>();
        Dataset::new(
            vec!["X".into(), "P".into(), "Q".into()],
            vec![
                Column::Categorical { levels: lv(3), codes: vec![0, 1, 2, 2, 1, 0, 0, 2] },
                Column::Categorical { levels: lv(2), codes: vec![0, 0, 1, 1, 0, 1, 0, 1] },
                // level 2 never observed
                Column::Categorical { levels: lv(3), codes: vec![0, 1, 0, 1, 0, 1, 0, 1] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn nparams_counts_all_configurations() {
        let c = Counts::new(&data(), 0, &[1, 2]);
        assert_eq!(c.nparams(), 2.0 * 6.0);
        assert_eq!(c.counts.len(), 4 * 3);
    }

    #[test]
    fn bde_matches_explicit_dirichlet_formula() {
        let d = data();
        let c = Counts::new(&d, 0, &[1]);
        // P = 0: X = 0,1,1,0 ; P = 1: X = 2,2,0,2
        let iss = 2.0;
        let (a_j, a_jk) = (iss / 2.0, iss / 6.0);
        let lg = ln_gamma;
        let expected = (lg(a_j) - lg(a_j + 4.0)) + 2.0 * (lg(a_jk + 2.0) - lg(a_jk))
            + (lg(a_j) - lg(a_j + 4.0)) + (lg(a_jk + 1.0) - lg(a_jk)) + (lg(a_jk + 3.0) - lg(a_jk));
        assert!((c.bde(iss) - expected).abs() < 1e-12);
    }

    #[test]
    fn k2_matches_factorials() {
        let d = data();
        let c = Counts::new(&d, 0, &[1]);
        // per configuration: (R-1)! / (n_j + R - 1)! * prod n_jk!
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let expected = (f(2) / f(6) * f(2) * f(2)).ln() + (f(2) / f(6) * f(1) * f(3)).ln();
        assert!((c.k2() - expected).abs() < 1e-12);
    }

    #[test]
    fn loglik_of_balanced_root() {
        let d = data();
        let c = Counts::new(&d, 1, &[]);
        assert!((c.loglik() - 8.0 * 0.5f64.ln()).abs() < 1e-12);
    }
}
