use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::eigen::eigvals_sym;
use crate::error::{Error, Result};
use crate::preprocess::AmplitudeTensor;

/// Window geometry and how many eigenvalues each feature keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    /// Snapshots per window (100 = 1 s at 100 Hz).
    pub window_len: usize,
    /// Step between window starts; `None` means non-overlapping windows.
    #[serde(default)]
    pub stride: Option<usize>,
    /// Amplitude eigenvalues kept after discarding the largest.
    pub k_amplitude: usize,
    /// Phase eigenvalues kept after discarding the largest.
    pub k_phase: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            window_len: 100,
            stride: None,
            k_amplitude: 6,
            k_phase: 6,
        }
    }
}

impl WindowConfig {
    pub fn with_dims(k_amplitude: usize, k_phase: usize) -> Self {
        Self {
            k_amplitude,
            k_phase,
            ..Self::default()
        }
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(self.window_len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len < self.k_amplitude + 2 {
            return Err(Error::arg(format!(
                "window length {} must be at least k_amplitude + 2 = {}",
                self.window_len,
                self.k_amplitude + 2
            )));
        }
        if self.stride() == 0 {
            return Err(Error::arg("window stride must be positive"));
        }
        Ok(())
    }
}

/// Averaged eigen-profile of the windowed snapshot Gram matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFeature(pub Vec<f64>);

/// Gram matrix `E^T E` of the snapshots `start..start+len`, where each
/// snapshot is the flattened `F x M` amplitude matrix.
pub fn window_gram(a: &AmplitudeTensor, start: usize, len: usize) -> Array2<f64> {
    let values = a.values();
    let (nf, nm, _) = values.dim();
    let mut s = Array2::<f64>::zeros((len, len));
    let mut row = vec![0.0; len];
    for f in 0..nf {
        for m in 0..nm {
            let lane = values.slice(ndarray::s![f, m, start..start + len]);
            for (dst, &v) in row.iter_mut().zip(lane.iter()) {
                *dst = v;
            }
            for p in 0..len {
                let xp = row[p];
                if xp == 0.0 {
                    continue;
                }
                let mut srow = s.row_mut(p);
                let srow = srow.as_slice_mut().expect("owned array is contiguous");
                for q in p..len {
                    srow[q] += xp * row[q];
                }
            }
        }
    }
    for p in 0..len {
        for q in 0..p {
            s[[p, q]] = s[[q, p]];
        }
    }
    s
}

/// Full descending eigenvalue spectrum of every window's Gram matrix.
pub fn window_spectra(a: &AmplitudeTensor, w: &WindowConfig) -> Result<Vec<Vec<f64>>> {
    w.validate()?;
    let (nf, nm, n) = a.dim();
    if nf * nm == 0 {
        return Err(Error::arg("amplitude tensor has no (f, m) rows"));
    }
    if n < w.window_len {
        return Err(Error::arg(format!(
            "need at least {} snapshots for one window, got {n}",
            w.window_len
        )));
    }
    if a.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("amplitude tensor contains non-finite values"));
    }
    let stride = w.stride();
    let windows = (n - w.window_len) / stride + 1;
    (0..windows)
        .map(|j| eigvals_sym(&window_gram(a, j * stride, w.window_len)))
        .collect()
}

/// Amplitude feature: for every window, sort the Gram eigenvalues, drop the
/// largest and keep the next `k_amplitude`; then average over windows.
pub fn extract_amplitude(a: &AmplitudeTensor, w: &WindowConfig) -> Result<AmplitudeFeature> {
    let spectra = window_spectra(a, w)?;
    let k = w.k_amplitude;
    let mut mean = vec![0.0; k];
    for spectrum in &spectra {
        for (acc, &lam) in mean.iter_mut().zip(&spectrum[1..=k]) {
            // Gram matrices are PSD; clip round-off below zero.
            *acc += lam.max(0.0);
        }
    }
    let count = spectra.len() as f64;
    mean.iter_mut().for_each(|v| *v /= count);
    Ok(AmplitudeFeature(mean))
}
