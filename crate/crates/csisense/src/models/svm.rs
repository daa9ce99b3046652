//! Linear SVM trained with Pegasos-style stochastic subgradient descent.
//!
//! Objective, on standardized inputs with a constant feature appended for the
//! bias:
//!
//! ```text
//! J(w) = lambda/2 * |w|^2 + 1/n * sum_i max(0, 1 - y_i <w, x_i>),   lambda = 1 / (C n)
//! ```
//!
//! Step `t` uses the rate `1 / (lambda t)`. The iterates of each epoch are
//! averaged and the epoch average with the lowest objective is kept, so the
//! reported objective trace never increases.

use ndarray::{Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_training_set, Standardizer, TrainConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Regularization trade-off the model was trained with.
    pub c: f64,
    pub standardizer: Standardizer,
}

/// Training diagnostics.
#[derive(Debug, Clone)]
pub struct SvmTrace {
    /// Best objective reached after each epoch.
    pub objective: Vec<f64>,
}

fn objective(w: &[f64], x: &[Vec<f64>], y: &[f64], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - yi * dot(w, xi)).max(0.0))
        .sum();
    reg + hinge / x.len() as f64
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

pub fn svm_train(x: &Array2<f64>, y: &[u8], cfg: &TrainConfig) -> Result<SvmModel> {
    svm_train_traced(x, y, cfg).map(|(m, _)| m)
}

pub fn svm_train_traced(
    x: &Array2<f64>,
    y: &[u8],
    cfg: &TrainConfig,
) -> Result<(SvmModel, SvmTrace)> {
    check_training_set(x, y)?;
    if !(cfg.svm_c.is_finite() && cfg.svm_c > 0.0) || cfg.svm_epochs == 0 {
        return Err(Error::arg("SVM needs C > 0 and at least one epoch"));
    }
    let standardizer = Standardizer::fit(x)?;
    let xs = standardizer.apply(x)?;
    let n = xs.nrows();
    let dim = xs.ncols() + 1;
    let rows: Vec<Vec<f64>> = xs
        .rows()
        .into_iter()
        .map(|r| r.iter().copied().chain(std::iter::once(1.0)).collect())
        .collect();
    let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

    let lambda = 1.0 / (cfg.svm_c * n as f64);
    let radius = 1.0 / lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; dim];
    let mut best_w = w.clone();
    let mut best_obj = objective(&w, &rows, &signs, lambda);
    let mut trace = Vec::with_capacity(cfg.svm_epochs);
    let mut t = 0usize;

    for _ in 0..cfg.svm_epochs {
        order.shuffle(&mut rng);
        let mut avg = vec![0.0; dim];
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let margin = signs[i] * dot(&w, &rows[i]);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                for (wj, xj) in w.iter_mut().zip(&rows[i]) {
                    *wj += eta * signs[i] * xj;
                }
            }
            let norm = dot(&w, &w).sqrt();
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
            }
            for (a, v) in avg.iter_mut().zip(&w) {
                *a += v;
            }
        }
        avg.iter_mut().for_each(|v| *v /= n as f64);
        let obj = objective(&avg, &rows, &signs, lambda);
        if obj < best_obj {
            best_obj = obj;
            best_w = avg;
        }
        trace.push(best_obj);
    }

    let bias = best_w.pop().expect("bias term");
    Ok((
        SvmModel {
            weights: best_w,
            bias,
            c: cfg.svm_c,
            standardizer,
        },
        SvmTrace { objective: trace },
    ))
}

impl SvmModel {
    /// Signed distance-like score `w . x' + b` on the standardized input.
    pub fn decision(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        let xs = self.standardizer.apply_row(x)?;
        Ok(dot(&self.weights, &xs) + self.bias)
    }

    /// Class 1 iff the decision value is strictly positive.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        Ok(u8::from(self.decision(x)? > 0.0))
    }

    pub fn predict_batch(&self, x: &Array2<f64>) -> Result<Vec<u8>> {
        x.rows().into_iter().map(|r| self.predict(r)).collect()
    }
}
