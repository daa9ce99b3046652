//! Turn raw CSI into analysis-ready arrays.
//!
//! The order is fixed: resample onto a uniform grid first, then split into an
//! amplitude path (magnitude, wavelet denoising) and a phase path (unwrapping).

mod interp;
mod unwrap;
pub mod wavelet;

use ndarray::{Array3, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result, StageExt};
use crate::types::CsiTensor;

pub use interp::interpolate_uniform;
pub use unwrap::{unwrap_phase, unwrap_series};
pub use wavelet::{denoise_series, Thresholds};

/// Magnitudes `[F x M x N]` on a uniform snapshot grid. Non-negative and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTensor {
    values: Array3<f64>,
}

impl AmplitudeTensor {
    pub fn new(values: Array3<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::arg("amplitudes must be finite and non-negative"));
        }
        Ok(Self { values })
    }

    /// Magnitude of every CSI element.
    pub fn from_csi(t: &CsiTensor) -> Self {
        Self {
            values: t.data().mapv(|z| z.norm()),
        }
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn dim(&self) -> (usize, usize, usize) {
        self.values.dim()
    }

    pub fn into_inner(self) -> Array3<f64> {
        self.values
    }
}

/// Phases `[F x M x N]` in radians, unwrapped along the snapshot axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTensor {
    values: Array3<f64>,
}

impl PhaseTensor {
    /// Wrap already-unwrapped phase series.
    pub fn new(values: Array3<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("phases must be finite"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn dim(&self) -> (usize, usize, usize) {
        self.values.dim()
    }

    pub fn into_inner(self) -> Array3<f64> {
        self.values
    }
}

/// Denoise every `(f, m)` amplitude series with a 2-level DWT and per-band
/// SURE soft thresholding. Negative reconstructions are clamped to zero.
pub fn denoise_amplitude(a: &AmplitudeTensor) -> Result<AmplitudeTensor> {
    denoise_amplitude_with(a, Thresholds::Sure)
}

/// [`denoise_amplitude`] with an explicit thresholding rule.
pub fn denoise_amplitude_with(a: &AmplitudeTensor, rule: Thresholds) -> Result<AmplitudeTensor> {
    let (_, _, n) = a.dim();
    if n < wavelet::MIN_LEN {
        return Err(Error::arg(format!(
            "denoising needs at least {} snapshots, got {n}",
            wavelet::MIN_LEN
        )));
    }
    let mut out = a.values.clone();
    for mut lane in out.lanes_mut(ndarray::Axis(2)) {
        let series: Vec<f64> = lane.to_vec();
        let clean = denoise_series(&series, rule)?;
        for (dst, v) in lane.iter_mut().zip(clean) {
            *dst = v.max(0.0);
        }
    }
    Ok(AmplitudeTensor { values: out })
}

/// Output of the preprocessing chain for one capture.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// Uniform snapshot grid after interpolation.
    pub timestamps: Vec<f64>,
    pub amplitude: AmplitudeTensor,
    pub phase: PhaseTensor,
}

/// interpolate, then (magnitude, denoise) and (unwrap).
pub fn preprocess(t: &CsiTensor) -> Result<Preprocessed> {
    let uniform = interpolate_uniform(t).stage("interpolate")?;
    let amplitude = denoise_amplitude(&AmplitudeTensor::from_csi(&uniform)).stage("denoise")?;
    let phase = unwrap_phase(&uniform);
    Ok(Preprocessed {
        timestamps: uniform.timestamps().to_vec(),
        amplitude,
        phase,
    })
}

/// Store a real tensor as CSI with zero imaginary parts (debug dumps).
pub fn real_to_csi(values: &Array3<f64>, timestamps: &[f64]) -> Result<CsiTensor> {
    let mut data = Array3::<Complex64>::zeros(values.dim());
    Zip::from(&mut data)
        .and(values)
        .for_each(|z, &v| *z = Complex64::new(v, 0.0));
    CsiTensor::new(data, timestamps.to_vec())
}
