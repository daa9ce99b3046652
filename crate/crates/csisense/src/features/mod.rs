//! Amplitude and phase eigen-features and the classifier input built from them.
//!
//! The amplitude feature tracks how the correlation between snapshots inside
//! short windows changes when something moves; the phase feature tracks how
//! the residual phase jitter (after removing each series' linear CFO ramp)
//! correlates across the antenna array. Both discard the dominant eigenvalue,
//! which is large for static and dynamic scenes alike.

mod amplitude;
pub mod eigen;
mod phase;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::preprocess::preprocess;
use crate::types::{CsiTensor, Event, Scenario};

pub use amplitude::{
    extract_amplitude, window_gram, window_spectra, AmplitudeFeature, WindowConfig,
};
pub use eigen::{eig_sym, eigvals_sym, SymmetricEigen};
pub use phase::{
    correlation_matrix, extract_phase, fit_line, phase_feature_from_variances,
    regression_residuals, residual_variances, variance, PhaseFeature,
};

/// Classifier input `[amplitude features, phase features]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Concatenate the two features after checking their lengths against `w`.
pub fn build_feature_vector(
    a: &AmplitudeFeature,
    p: &PhaseFeature,
    w: &WindowConfig,
) -> Result<FeatureVector> {
    if a.0.len() != w.k_amplitude || p.0.len() != w.k_phase {
        return Err(Error::arg(format!(
            "feature lengths ({}, {}) do not match configured ({}, {})",
            a.0.len(),
            p.0.len(),
            w.k_amplitude,
            w.k_phase
        )));
    }
    let mut x = Vec::with_capacity(a.0.len() + p.0.len());
    x.extend_from_slice(&a.0);
    x.extend_from_slice(&p.0);
    Ok(FeatureVector(x))
}

/// Number of phase eigenvalues obtainable from `rf_chains` antennas.
///
/// Arrays too small for `k_phase` yield fewer eigenvalues; the rest of the
/// phase block is zero-padded so the classifier input size stays fixed.
pub fn effective_phase_dims(rf_chains: usize, k_phase: usize) -> usize {
    k_phase.min(rf_chains.saturating_sub(2))
}

/// Full feature pipeline for one capture: preprocess, then both extractors.
pub fn experiment_features(csi: &CsiTensor, w: &WindowConfig) -> Result<FeatureVector> {
    let pre = preprocess(csi)?;
    let amp = extract_amplitude(&pre.amplitude, w).stage("amplitude features")?;
    let k_eff = effective_phase_dims(csi.rf_chains(), w.k_phase);
    let mut phase = if k_eff > 0 {
        extract_phase(&pre.phase, k_eff).stage("phase features")?
    } else {
        PhaseFeature(Vec::new())
    };
    phase.0.resize(w.k_phase, 0.0);
    build_feature_vector(&amp, &phase, w)
}

/// One exported feature row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub event: Event,
    /// Binary class under the active case.
    pub label: u8,
    pub scenario: Scenario,
    pub x: Vec<f64>,
}
