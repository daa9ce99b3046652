//! Two-level Daubechies-4 wavelet denoising with SURE soft thresholding.
//!
//! The transform uses half-sample symmetric boundary extension. Odd-length
//! inputs are padded to even length by repeating the last sample (which is
//! that same extension) and the reconstruction is truncated back.

use crate::error::{Error, Result};

/// Daubechies-4 (8-tap, 4 vanishing moments) decomposition low-pass filter.
pub const DB4_LO: [f64; 8] = [
    -0.010_597_401_785_069_032,
    0.032_883_011_666_885_2,
    0.030_841_381_835_560_764,
    -0.187_034_811_719_093_09,
    -0.027_983_769_416_859_854,
    0.630_880_767_929_858_9,
    0.714_846_570_552_915_7,
    0.230_377_813_308_896_5,
];

const LEVELS: usize = 2;

/// Shortest series the 2-level transform accepts.
pub const MIN_LEN: usize = 8;

/// Quadrature mirror high-pass: `g[j] = (-1)^j h[L-1-j]`.
fn db4_hi() -> [f64; 8] {
    let mut g = [0.0; 8];
    for (j, v) in g.iter_mut().enumerate() {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        *v = s * DB4_LO[DB4_LO.len() - 1 - j];
    }
    g
}

/// Half-sample symmetric extension: `x[-1] = x[0]`, `x[n] = x[n-1]`.
#[inline]
fn sym_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = i.rem_euclid(period) as usize;
    if r < n {
        r
    } else {
        2 * n - 1 - r
    }
}

/// One analysis step. Returns `(approximation, detail)`, each of length
/// `(len + 7) / 2` for an even-padded input.
pub fn dwt(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut padded;
    let x = if x.len() % 2 == 1 {
        padded = x.to_vec();
        padded.push(*x.last().expect("non-empty"));
        &padded[..]
    } else {
        x
    };
    let n = x.len();
    let h = DB4_LO;
    let g = db4_hi();
    let taps = h.len();
    let out_len = (n + taps - 1) / 2;
    let mut approx = vec![0.0; out_len];
    let mut detail = vec![0.0; out_len];
    for o in 0..out_len {
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..taps {
            let xi = x[sym_index(2 * o as isize + 1 - j as isize, n)];
            a += h[j] * xi;
            d += g[j] * xi;
        }
        approx[o] = a;
        detail[o] = d;
    }
    (approx, detail)
}

/// One synthesis step, producing `len` samples (the pre-padding length).
pub fn idwt(approx: &[f64], detail: &[f64], len: usize) -> Vec<f64> {
    debug_assert_eq!(approx.len(), detail.len());
    let h = DB4_LO;
    let g = db4_hi();
    let taps = h.len() as isize;
    let k = approx.len() as isize;
    (0..len as isize)
        .map(|n| {
            // coefficient o touches sample n when 0 <= 2o + 1 - n < taps
            let lo = n / 2;
            let hi = ((n + taps - 2).div_euclid(2)).min(k - 1);
            let mut acc = 0.0;
            for o in lo..=hi {
                let j = (2 * o + 1 - n) as usize;
                acc += approx[o as usize] * h[j] + detail[o as usize] * g[j];
            }
            acc
        })
        .collect()
}

/// How detail-band thresholds are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thresholds {
    /// Per-band threshold minimizing Stein's unbiased risk estimate.
    Sure,
    /// Fixed thresholds for the level-1 and level-2 detail bands.
    Fixed([f64; 2]),
}

/// Soft thresholding: `sign(x) * max(|x| - t, 0)`.
#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Noise level of a detail band from its median absolute coefficient.
pub fn band_sigma(coeffs: &[f64]) -> f64 {
    median(coeffs.iter().map(|c| c.abs()).collect()) / 0.6745
}

/// SURE-minimizing soft threshold for one band.
///
/// Coefficients are normalized by the band's MAD noise estimate; the risk
/// `n - 2 #{|x| <= t} + sum min(x^2, t^2)` is minimized over `t = 0` and
/// `t = |x_i|`, and the winner is scaled back by the noise estimate.
pub fn sure_threshold(coeffs: &[f64]) -> f64 {
    let sigma = band_sigma(coeffs);
    if coeffs.is_empty() || sigma <= 0.0 || !sigma.is_finite() {
        return 0.0;
    }
    let mut sq: Vec<f64> = coeffs.iter().map(|c| (c / sigma).powi(2)).collect();
    sq.sort_by(f64::total_cmp);
    let n = sq.len() as f64;
    let mut best_risk = n;
    let mut best_sq = 0.0;
    let mut cumsum = 0.0;
    for (i, &s) in sq.iter().enumerate() {
        cumsum += s;
        let k = (i + 1) as f64;
        let risk = n - 2.0 * k + cumsum + (n - k) * s;
        if risk < best_risk {
            best_risk = risk;
            best_sq = s;
        }
    }
    sigma * best_sq.sqrt()
}

/// Denoise one series: 2-level DWT, soft-threshold both detail bands,
/// inverse DWT. The approximation band is left untouched.
pub fn denoise_series(x: &[f64], rule: Thresholds) -> Result<Vec<f64>> {
    if x.len() < MIN_LEN {
        return Err(Error::arg(format!(
            "wavelet denoising needs at least {MIN_LEN} samples, got {}",
            x.len()
        )));
    }
    let mut lengths = Vec::with_capacity(LEVELS);
    let mut details = Vec::with_capacity(LEVELS);
    let mut approx = x.to_vec();
    for _ in 0..LEVELS {
        lengths.push(approx.len());
        let (a, d) = dwt(&approx);
        details.push(d);
        approx = a;
    }
    for (level, band) in details.iter_mut().enumerate() {
        let t = match rule {
            Thresholds::Sure => sure_threshold(band),
            Thresholds::Fixed(ts) => ts[level],
        };
        if t > 0.0 {
            band.iter_mut().for_each(|c| *c = soft_threshold(*c, t));
        }
    }
    for level in (0..LEVELS).rev() {
        approx = idwt(&approx, &details[level], lengths[level]);
    }
    Ok(approx)
}
