use super::{TestKind, TestResult};
use crate::data::ContingencyTable;
use crate::error::{Error, Result};
use crate::special::chi2_sf;

fn nonempty(t: &ContingencyTable) -> Result<f64> {
    let n = t.total();
    if n == 0 {
        return Err(Error::InvalidArgument("empty contingency table".into()));
    }
    Ok(n as f64)
}

/// Conditional mutual information (natural log) of a contingency table.
pub fn mi_discrete(t: &ContingencyTable) -> Result<f64> {
    let n = nonempty(t)?;
    let mut acc = 0.0;
    for k in 0..t.strata() {
        let (rs, cs, nk) = t.margins(k);
        if nk == 0 {
            continue;
        }
        let nk = nk as f64;
        for (i, &ri) in rs.iter().enumerate() {
            for (j, &cj) in cs.iter().enumerate() {
                let nijk = t.get(i, j, k);
                if nijk == 0 {
                    continue;
                }
                let nijk = nijk as f64;
                acc += nijk * ((nijk * nk) / (ri as f64 * cj as f64)).ln();
            }
        }
    }
    Ok((acc / n).max(0.0))
}

/// Pearson's X² statistic; cells with zero expected count contribute 0.
pub fn x2_discrete(t: &ContingencyTable) -> Result<f64> {
    nonempty(t)?;
    let mut acc = 0.0;
    for k in 0..t.strata() {
        let (rs, cs, nk) = t.margins(k);
        if nk == 0 {
            continue;
        }
        let nk = nk as f64;
        for (i, &ri) in rs.iter().enumerate() {
            for (j, &cj) in cs.iter().enumerate() {
                let m = ri as f64 * cj as f64 / nk;
                if m > 0.0 {
                    let diff = t.get(i, j, k) as f64 - m;
                    acc += diff * diff / m;
                }
            }
        }
    }
    Ok(acc)
}

/// Mutual information, or 0 when there are fewer than five observations per
/// degree of freedom.
pub fn fmi_statistic(t: &ContingencyTable, n: u64) -> f64 {
    if n < 5 * t.df() as u64 {
        return 0.0;
    }
    mi_discrete(t).unwrap_or(0.0)
}

/// AIC-style decision: dependent iff MI ≥ (R−1)(C−1)L / n.
pub fn aic_test(t: &ContingencyTable, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mi = mi_discrete(t).unwrap_or(0.0);
    mi >= t.df() as f64 / n as f64
}

/// Asymptotic discrete test of the given kind on a table.
pub fn discrete_test(t: &ContingencyTable, kind: TestKind) -> Result<TestResult> {
    let n = nonempty(t)?;
    let df = t.df() as f64;
    let (statistic, p_value) = match kind {
        TestKind::Mi => {
            let g2 = 2.0 * n * mi_discrete(t)?;
            (g2, asymptotic_p(g2, df))
        }
        TestKind::X2 => {
            let x2 = x2_discrete(t)?;
            (x2, asymptotic_p(x2, df))
        }
        TestKind::Fmi => {
            let g2 = 2.0 * n * fmi_statistic(t, t.total());
            (g2, asymptotic_p(g2, df))
        }
        TestKind::Aict => {
            let mi = mi_discrete(t)?;
            let p = if aic_test(t, t.total()) { 0.0 } else { 1.0 };
            (mi, p)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "'{other}' is not an asymptotic discrete test"
            )))
        }
    };
    Ok(TestResult { statistic, df: Some(df), replicates: None, p_value, kind, infinite: false })
}

// A table with a single row or column has df 0 and carries no evidence.
fn asymptotic_p(stat: f64, df: f64) -> f64 {
    if df <= 0.0 {
        1.0
    } else {
        chi2_sf(stat, df).clamp(0.0, 1.0)
    }
}
