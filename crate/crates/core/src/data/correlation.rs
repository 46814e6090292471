use nalgebra::{DMatrix, DVector};

use super::{DataKind, Dataset};
use crate::error::{Error, Result};

/// Residual variances below this (on the correlation scale) mean the
/// variable is an exact linear function of the conditioning set.
const DEGENERATE: f64 = 1e-12;

fn centered(d: &Dataset, i: usize) -> Result<(Vec<f64>, f64)> {
    let v = d.values(i);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let ss: f64 = c.iter().map(|x| x * x).sum();
    if ss <= 0.0 {
        return Err(Error::Data(format!("column '{}' has zero variance", d.names()[i])));
    }
    Ok((c, ss.sqrt()))
}

pub(crate) fn correlation_by_index(d: &Dataset, vars: &[usize]) -> Result<DMatrix<f64>> {
    if d.n_rows() < 2 {
        return Err(Error::Data("correlations need at least two rows".into()));
    }
    let cols = vars.iter().map(|&v| centered(d, v)).collect::<Result<Vec<_>>>()?;
    let k = vars.len();
    let mut m = DMatrix::identity(k, k);
    for a in 0..k {
        for b in a + 1..k {
            let dot: f64 = cols[a].0.iter().zip(&cols[b].0).map(|(x, y)| x * y).sum();
            let r = (dot / (cols[a].1 * cols[b].1)).clamp(-1.0, 1.0);
            m[(a, b)] = r;
            m[(b, a)] = r;
        }
    }
    Ok(m)
}

/// Pearson correlations of the given numeric columns, unit diagonal.
pub fn correlation_matrix<S: AsRef<str>>(d: &Dataset, vars: &[S]) -> Result<DMatrix<f64>> {
    d.require(DataKind::Continuous, "correlation")?;
    let idx = vars.iter().map(|v| d.index_of(v.as_ref())).collect::<Result<Vec<_>>>()?;
    correlation_by_index(d, &idx)
}

/// Partial correlation of positions `x` and `y` of a correlation matrix
/// given positions `z`, through the conditional covariance of (x, y) given
/// z (the inverse of the corresponding block of the inverted submatrix).
/// Returns 0 when x or y is an exact linear function of z.
pub fn partial_from_correlation(corr: &DMatrix<f64>, x: usize, y: usize, z: &[usize]) -> Result<f64> {
    let pick = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| corr[(rows[r], cols[c])])
    };
    let xy = [x, y];
    let mut cond = pick(&xy, &xy);
    if !z.is_empty() {
        let zz = pick(z, z);
        let zxy = pick(z, &xy);
        let chol = zz
            .cholesky()
            .ok_or_else(|| Error::Singular("the conditioning set".into()))?;
        let solved = chol.solve(&zxy);
        cond -= zxy.transpose() * solved;
    }
    let (sxx, syy, sxy) = (cond[(0, 0)], cond[(1, 1)], cond[(0, 1)]);
    if sxx <= DEGENERATE || syy <= DEGENERATE {
        return Ok(0.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Partial correlation of `x` and `y` given `z`; plain correlation for an
/// empty `z`. Symmetric in `x` and `y`.
pub fn partial_correlation(d: &Dataset, x: &str, y: &str, z: &[String]) -> Result<f64> {
    d.require(DataKind::Continuous, "partial correlation")?;
    let (xi, yi, zi) = super::contingency::check_triple(d, x, y, z)?;
    if d.n_rows() <= zi.len() + 2 {
        return Err(Error::Data(format!(
            "{} rows are too few to condition on {} variables",
            d.n_rows(),
            zi.len()
        )));
    }
    partial_by_index(d, xi, yi, &zi)
}

pub(crate) fn partial_by_index(d: &Dataset, x: usize, y: usize, z: &[usize]) -> Result<f64> {
    // order the submatrix so that x and y come first; the result does not
    // depend on which of the two is listed first
    let (a, b) = if x < y { (x, y) } else { (y, x) };
    let mut vars = vec![a, b];
    vars.extend_from_slice(z);
    let corr = correlation_by_index(d, &vars)?;
    let zpos: Vec<usize> = (2..vars.len()).collect();
    partial_from_correlation(&corr, 0, 1, &zpos)
}

/// Least-squares residuals of `target` regressed on `z` with an intercept.
pub fn residuals(d: &Dataset, target: usize, z: &[usize]) -> Result<Vec<f64>> {
    let n = d.n_rows();
    let t = d.values(target);
    let mean = t.iter().sum::<f64>() / n as f64;
    let mut r: Vec<f64> = t.iter().map(|v| v - mean).collect();
    if z.is_empty() {
        return Ok(r);
    }
    let mut design = DMatrix::zeros(n, z.len());
    for (c, &zi) in z.iter().enumerate() {
        let v = d.values(zi);
        let m = v.iter().sum::<f64>() / n as f64;
        for row in 0..n {
            design[(row, c)] = v[row] - m;
        }
    }
    let rhs = DVector::from_column_slice(&r);
    let gram = design.transpose() * &design;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Singular("the conditioning set".into()))?;
    let beta = chol.solve(&(design.transpose() * rhs));
    let fitted = design * beta;
    for (ri, f) in r.iter_mut().zip(fitted.iter()) {
        *ri -= f;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Column;

    fn numeric(cols: Vec<(&str, Vec<f64>)>) -> Dataset {
        let names = cols.iter().map(|(n, _)| n.to_string()).collect();
        Dataset::new(names, cols.into_iter().map(|(_, v)| Column::Numeric(v)).collect()).unwrap()
    }

    #[test]
    fn self_and_negated() {
        let x: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let d = numeric(vec![("X", x.clone()), ("Y", neg), ("W", x)]);
        let m = correlation_matrix(&d, &["X", "Y", "W"]).unwrap();
        assert!((m[(0, 1)] + 1.0).abs() < 1e-12);
        assert!((m[(0, 2)] - 1.0).abs() < 1e-12);
        assert_eq!(m[(1, 1)], 1.0);
    }

    #[test]
    fn four_point_hand_value() {
        // x = 0,1,2,3; y = 0,1,2,0. Means 1.5 and 0.75.
        // Sxy = 0.5, Sxx = 5, Syy = 2.75, r = 0.5 / sqrt(13.75)
        let d = numeric(vec![("X", vec![0.0, 1.0, 2.0, 3.0]), ("Y", vec![0.0, 1.0, 2.0, 0.0])]);
        let m = correlation_matrix(&d, &["X", "Y"]).unwrap();
        assert!((m[(0, 1)] - 0.5 / 13.75f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_variance_is_an_error() {
        let d = numeric(vec![("X", vec![1.0, 1.0, 1.0]), ("Y", vec![0.0, 1.0, 2.0])]);
        assert!(correlation_matrix(&d, &["X", "Y"]).is_err());
    }

    #[test]
    fn empty_conditioning_set_is_plain_correlation() {
        let d = numeric(vec![("X", vec![0.0, 1.0, 2.0, 3.0, 5.0]), ("Y", vec![1.0, 0.0, 2.0, 2.5, 4.0])]);
        let m = correlation_matrix(&d, &["X", "Y"]).unwrap();
        assert!((partial_correlation(&d, "X", "Y", &[]).unwrap() - m[(0, 1)]).abs() < 1e-15);
    }

    #[test]
    fn deterministic_function_of_z_gives_zero() {
        let z: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let y: Vec<f64> = z.iter().map(|v| 3.0 * v - 1.0).collect();
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 1.3).cos() + 0.1 * i as f64).collect();
        let d = numeric(vec![("X", x), ("Y", y), ("Z", z)]);
        let r = partial_correlation(&d, "X", "Y", &["Z".into()]).unwrap();
        assert!(r.abs() < 1e-10);
        // the regression-residual route agrees: y has no residual variation
        let ry = residuals(&d, 1, &[2]).unwrap();
        assert!(ry.iter().map(|v| v * v).sum::<f64>() < 1e-20);
    }

    #[test]
    fn matches_explicit_inverse() {
        let n = 50;
        let a: Vec<f64> = (0..n).map(|i| ((i * 7919) % 97) as f64 / 97.0).collect();
        let b: Vec<f64> = (0..n).map(|i| a[i] * 0.5 + ((i * 31) % 13) as f64 / 13.0).collect();
        let c: Vec<f64> = (0..n).map(|i| a[i] - b[i] * 0.3 + ((i * 17) % 11) as f64 / 11.0).collect();
        let e: Vec<f64> = (0..n).map(|i| c[i] + ((i * 5) % 7) as f64 / 7.0).collect();
        let d = numeric(vec![("A", a), ("B", b), ("C", c), ("E", e)]);
        let corr = correlation_matrix(&d, &["A", "B", "C", "E"]).unwrap();
        let omega = corr.clone().try_inverse().unwrap();
        let expected = -omega[(0, 1)] / (omega[(0, 0)] * omega[(1, 1)]).sqrt();
        let got = partial_correlation(&d, "A", "B", &["C".into(), "E".into()]).unwrap();
        assert!((got - expected).abs() < 1e-12);
        let swapped = partial_correlation(&d, "B", "A", &["C".into(), "E".into()]).unwrap();
        assert_eq!(got, swapped);
        // residual route
        let rx = residuals(&d, 0, &[2, 3]).unwrap();
        let ry = residuals(&d, 1, &[2, 3]).unwrap();
        let dot: f64 = rx.iter().zip(&ry).map(|(p, q)| p * q).sum();
        let nx: f64 = rx.iter().map(|p| p * p).sum::<f64>().sqrt();
        let ny: f64 = ry.iter().map(|q| q * q).sum::<f64>().sqrt();
        assert!((dot / (nx * ny) - expected).abs() < 1e-10);
    }
}
