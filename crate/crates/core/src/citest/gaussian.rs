use super::{TestKind, TestResult};
use crate::error::{Error, Result};
use crate::special::{chi2_sf, normal_two_sided, student_t_two_sided};

/// Statistic and two-sided p-value of a Gaussian test on a (partial)
/// correlation `rho` estimated from `n` rows conditioning on `zsize`
/// variables. |rho| = 1 yields p = 0 with the `infinite` flag set.
pub fn gaussian_statistic(rho: f64, n: usize, zsize: usize, kind: TestKind) -> Result<TestResult> {
    if rho.is_nan() || rho.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!("correlation {rho} outside [-1, 1]")));
    }
    let kind = kind.parametric();
    let need = match kind {
        TestKind::Cor | TestKind::MiG => zsize + 2,
        TestKind::Zf => zsize + 3,
        other => {
            return Err(Error::InvalidArgument(format!("'{other}' is not a Gaussian test")));
        }
    };
    if n <= need {
        return Err(Error::Data(format!(
            "{n} rows are too few to condition on {zsize} variables"
        )));
    }
    let nf = n as f64;
    let infinite = rho.abs() == 1.0;
    let saturated = f64::MAX.copysign(rho);
    let result = |statistic: f64, df: Option<f64>, p_value: f64| TestResult {
        statistic,
        df,
        replicates: None,
        p_value: p_value.clamp(0.0, 1.0),
        kind,
        infinite,
    };
    Ok(match kind {
        TestKind::Cor => {
            let df = nf - zsize as f64 - 2.0;
            if infinite {
                result(saturated, Some(df), 0.0)
            } else {
                let t = rho * (df / (1.0 - rho * rho)).sqrt();
                result(t, Some(df), student_t_two_sided(t, df))
            }
        }
        TestKind::Zf => {
            if infinite {
                result(saturated, None, 0.0)
            } else {
                let z = 0.5 * (nf - zsize as f64 - 3.0).sqrt() * ((1.0 + rho) / (1.0 - rho)).ln();
                result(z, None, normal_two_sided(z))
            }
        }
        _ => {
            if infinite {
                result(f64::MAX, Some(1.0), 0.0)
            } else {
                let stat = 2.0 * nf * mi_gaussian(rho);
                result(stat, Some(1.0), chi2_sf(stat, 1.0))
            }
        }
    })
}

/// −½ log(1 − rho²), computed without cancellation for small rho.
pub(crate) fn mi_gaussian(rho: f64) -> f64 {
    -0.5 * (-rho * rho).ln_1p()
}
