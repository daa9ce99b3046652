//! Linear SVM and feedforward network classifiers.
//!
//! Both standardize their inputs with statistics from the training rows and
//! predict binary labels in `{0, 1}`.

pub mod nn;
mod standardize;
pub mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use nn::{nn_train, nn_train_from, Network, NnModel};
pub use standardize::Standardizer;
pub use svm::{svm_train, svm_train_traced, SvmModel, SvmTrace};

/// Training hyperparameters shared by both classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub svm_c: f64,
    pub svm_epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            epochs: 500,
            batch_size: 8,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            svm_c: 1.0,
            svm_epochs: 200,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.epochs == 0 || self.batch_size == 0 || self.svm_epochs == 0 {
            return Err(Error::arg("epochs and batch sizes must be positive"));
        }
        if !(positive(self.learning_rate) && positive(self.epsilon) && positive(self.svm_c)) {
            return Err(Error::arg("learning rate, epsilon and C must be positive"));
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2)) {
            return Err(Error::arg("Adam betas must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Reject training sets the classifiers cannot learn from.
pub(crate) fn check_training_set(x: &Array2<f64>, y: &[u8]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::arg(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() == 0 {
        return Err(Error::arg("training rows have no features"));
    }
    if let Some(bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::arg(format!("label {bad} is not binary")));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::arg("training set needs both classes"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("training rows contain non-finite values"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Svm,
    Nn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Svm, ModelKind::Nn];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Svm => "svm",
            ModelKind::Nn => "nn",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(ModelKind::Svm),
            "nn" => Ok(ModelKind::Nn),
            _ => Err(Error::arg(format!(
                "unknown model '{s}', expected svm or nn"
            ))),
        }
    }
}

/// Either trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classifier {
    Svm(SvmModel),
    Nn(NnModel),
}

impl Classifier {
    pub fn train(kind: ModelKind, x: &Array2<f64>, y: &[u8], cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(match kind {
            ModelKind::Svm => Classifier::Svm(svm_train(x, y, cfg)?),
            ModelKind::Nn => Classifier::Nn(nn_train(x, y, cfg)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Classifier::Svm(_) => ModelKind::Svm,
            Classifier::Nn(_) => ModelKind::Nn,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Classifier::Svm(m) => m.weights.len(),
            Classifier::Nn(m) => m.network.input_dim(),
        }
    }

    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        match self {
            Classifier::Svm(m) => m.predict(x),
            Classifier::Nn(m) => m.predict(x),
        }
    }

    pub fn predict_batch(&self, x: &Array2<f64>) -> Result<Vec<u8>> {
        match self {
            Classifier::Svm(m) => m.predict_batch(x),
            Classifier::Nn(m) => m.predict_batch(x),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
