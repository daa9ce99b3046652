use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature affine scaling to zero mean and unit variance.
///
/// Uses the population standard deviation; features with zero spread get a
/// scale of 1 so they map to 0 rather than NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Array2<f64>) -> Result<Self> {
        let (rows, cols) = x.dim();
        if rows == 0 {
            return Err(Error::arg("cannot fit a standardizer on zero rows"));
        }
        let n = rows as f64;
        let mut mean = Vec::with_capacity(cols);
        let mut std = Vec::with_capacity(cols);
        for col in x.axis_iter(Axis(1)) {
            let mu = col.sum() / n;
            let var = col.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
            let s = var.sqrt();
            mean.push(mu);
            std.push(if s > 0.0 && s.is_finite() { s } else { 1.0 });
        }
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_row(&self, x: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::arg(format!(
                "expected {} features, got {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (mu, s))| (v - mu) / s)
            .collect())
    }

    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::arg(format!(
                "expected {} features, got {}",
                self.dim(),
                x.ncols()
            )));
        }
        let mut out = x.clone();
        for mut row in out.axis_iter_mut(Axis(0)) {
            for (v, (mu, s)) in row.iter_mut().zip(self.mean.iter().zip(&self.std)) {
                *v = (*v - mu) / s;
            }
        }
        Ok(out)
    }
}
