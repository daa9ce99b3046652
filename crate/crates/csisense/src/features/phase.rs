use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::eigen::eigvals_sym;
use crate::error::{Error, Result};
use crate::preprocess::PhaseTensor;

/// Column standard deviations at or below this are treated as constant.
const DEGENERATE_ABS: f64 = 1e-18;
/// Same, relative to the column's largest magnitude.
const DEGENERATE_REL: f64 = 1e-12;

/// Eigenvalues of the spatial correlation of phase-residual variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFeature(pub Vec<f64>);

/// Least-squares line `y ~ b0 + b1 * xi` with `xi = 1..=N`.
///
/// Returns `(intercept, slope)`.
pub fn fit_line(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    if n == 1 {
        return (y[0], 0.0);
    }
    let nf = n as f64;
    let xi_mean = (nf + 1.0) / 2.0;
    let y_mean = y.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &v) in y.iter().enumerate() {
        let dx = (i + 1) as f64 - xi_mean;
        sxy += dx * (v - y_mean);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    (y_mean - slope * xi_mean, slope)
}

/// Deviation of `y` from its least-squares line.
pub fn regression_residuals(y: &[f64]) -> Vec<f64> {
    let (b0, b1) = fit_line(y);
    y.iter()
        .enumerate()
        .map(|(i, &v)| v - b1 * (i + 1) as f64 - b0)
        .collect()
}

/// Population variance (divisor `N`).
pub fn variance(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// `Q[f, m]`: variance of the regression residual of each phase series.
pub fn residual_variances(p: &PhaseTensor) -> Array2<f64> {
    let (nf, nm, _) = p.dim();
    let mut q = Array2::zeros((nf, nm));
    for ((f, m), dst) in q.indexed_iter_mut() {
        let series = p.values().slice(ndarray::s![f, m, ..]).to_vec();
        *dst = variance(&regression_residuals(&series));
    }
    q
}

/// Pearson correlation between the columns of `q`, computed over its rows.
///
/// A column with (numerically) zero variance correlates 0 with every other
/// column and 1 with itself.
pub fn correlation_matrix(q: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = q.dim();
    let n = rows as f64;
    let mut centered = q.clone();
    let mut std = vec![0.0; cols];
    let mut degenerate = vec![false; cols];
    for (c, mut col) in centered.axis_iter_mut(Axis(1)).enumerate() {
        let mean = col.sum() / n;
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        col.mapv_inplace(|v| v - mean);
        let s = (col.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        std[c] = s;
        degenerate[c] = !(s > DEGENERATE_ABS && s > DEGENERATE_REL * scale);
    }
    let mut corr = Array2::<f64>::zeros((cols, cols));
    for i in 0..cols {
        corr[[i, i]] = 1.0;
        if degenerate[i] {
            continue;
        }
        for j in (i + 1)..cols {
            if degenerate[j] {
                continue;
            }
            let cov = centered
                .column(i)
                .iter()
                .zip(centered.column(j))
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n;
            let r = (cov / (std[i] * std[j])).clamp(-1.0, 1.0);
            corr[[i, j]] = r;
            corr[[j, i]] = r;
        }
    }
    corr
}

/// Phase feature from a precomputed residual-variance matrix.
pub fn phase_feature_from_variances(q: &Array2<f64>, k: usize) -> Result<PhaseFeature> {
    let (_, nm) = q.dim();
    if nm < k + 2 {
        return Err(Error::arg(format!(
            "phase feature with k = {k} needs at least {} RF chains, got {nm}",
            k + 2
        )));
    }
    let spectrum = eigvals_sym(&correlation_matrix(q))?;
    Ok(PhaseFeature(spectrum[1..=k].to_vec()))
}

/// Phase feature: fit a line to every unwrapped phase series, take the
/// residual variances `Q`, correlate `Q`'s columns across subcarriers, drop
/// the largest eigenvalue and keep the next `k`.
pub fn extract_phase(p: &PhaseTensor, k: usize) -> Result<PhaseFeature> {
    let (_, nm, n) = p.dim();
    if n < 3 {
        return Err(Error::arg(format!(
            "phase regression needs at least 3 snapshots, got {n}"
        )));
    }
    if nm < k + 2 {
        return Err(Error::arg(format!(
            "phase feature with k = {k} needs at least {} RF chains, got {nm}",
            k + 2
        )));
    }
    phase_feature_from_variances(&residual_variances(p), k)
}
