use ndarray::{Array3, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::CsiTensor;

/// Relative deviation from the ideal grid (in units of the grid spacing)
/// below which timestamps count as already uniform.
const UNIFORM_TOL: f64 = 1e-9;

/// Resample every `(f, m)` series onto `N` evenly spaced instants spanning
/// the first to the last input timestamp.
///
/// Real and imaginary parts are interpolated linearly and independently.
/// Endpoint samples are copied bit-exactly, and an input that already sits on
/// a uniform grid is returned unchanged.
pub fn interpolate_uniform(t: &CsiTensor) -> Result<CsiTensor> {
    let ts = t.timestamps();
    let n = ts.len();
    if n < 2 {
        return Err(Error::arg(format!(
            "interpolation needs at least 2 snapshots, got {n}"
        )));
    }
    let (t0, t1) = (ts[0], ts[n - 1]);
    let step = (t1 - t0) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { t1 } else { t0 + step * k as f64 })
        .collect();

    if ts
        .iter()
        .zip(&grid)
        .all(|(a, b)| (a - b).abs() <= UNIFORM_TOL * step)
    {
        return Ok(t.clone());
    }

    // For each grid point: index of the left sample and the blend weight.
    let mut weights = Vec::with_capacity(n);
    let mut left = 0usize;
    for (k, &g) in grid.iter().enumerate() {
        if k == 0 {
            weights.push((0, 0.0));
            continue;
        }
        if k == n - 1 {
            weights.push((n - 1, 0.0));
            continue;
        }
        while left + 2 < n && ts[left + 1] <= g {
            left += 1;
        }
        let w = (g - ts[left]) / (ts[left + 1] - ts[left]);
        weights.push((left, w));
    }

    let src = t.data();
    let mut out = Array3::<Complex64>::zeros(src.dim());
    for (src_lane, mut dst_lane) in src.lanes(Axis(2)).into_iter().zip(out.lanes_mut(Axis(2))) {
        for (dst, &(i, w)) in dst_lane.iter_mut().zip(&weights) {
            let a = src_lane[i];
            *dst = if w == 0.0 {
                a
            } else {
                let b = src_lane[i + 1];
                Complex64::new(a.re + w * (b.re - a.re), a.im + w * (b.im - a.im))
            };
        }
    }
    CsiTensor::new(out, grid)
}
