//! Weighted linear least squares shared by the fringe and thermal fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct LinearFit {
    pub coeffs: Vec<f64>,
    /// (XᵀWX)⁻¹
    pub covariance: DMatrix<f64>,
    pub residuals: Vec<f64>,
}

/// Minimizes Σ wᵢ (yᵢ − Σⱼ βⱼ Xᵢⱼ)² with `columns[j][i] = Xᵢⱼ`. Unit weights
/// when `weights` is `None`.
pub(crate) fn weighted_lstsq(columns: &[Vec<f64>], y: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    let n = y.len();
    let p = columns.len();
    if n < p {
        return Err(Error::InsufficientData { needed: p, got: n });
    }
    let sw: Vec<f64> = match weights {
        Some(w) => w.iter().map(|x| x.sqrt()).collect(),
        None => vec![1.0; n],
    };
    let x = DMatrix::from_fn(n, p, |i, j| columns[j][i] * sw[i]);
    let yw = DVector::from_iterator(n, y.iter().zip(&sw).map(|(v, s)| v * s));
    let svd = x.svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    if !(smax > 0.0) || s.min() <= smax * 1e-12 {
        return Err(Error::Degenerate("design matrix is rank deficient".into()));
    }
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let inv = DMatrix::from_diagonal(&s.map(|x| 1.0 / x));
    let beta = vt.transpose() * &inv * (u.transpose() * &yw);
    let covariance = vt.transpose() * &inv * &inv * vt;
    let coeffs: Vec<f64> = beta.iter().copied().collect();
    let residuals = (0..n)
        .map(|i| y[i] - (0..p).map(|j| columns[j][i] * coeffs[j]).sum::<f64>())
        .collect();
    Ok(LinearFit {
        coeffs,
        covariance,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = weighted_lstsq(&[vec![1.0; 10], x], &y, None).unwrap();
        assert!((fit.coeffs[0] - 2.0).abs() < 1e-12);
        assert!((fit.coeffs[1] + 0.5).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn rank_deficient() {
        let fit = weighted_lstsq(&[vec![1.0; 5], vec![2.0; 5]], &[1.0; 5], None);
        assert!(matches!(fit, Err(Error::Degenerate(_))));
    }
}
