use std::f64::consts::{PI, TAU};

use ndarray::Axis;

use super::PhaseTensor;
use crate::types::CsiTensor;

/// Unwrap a series of principal-value phases in place.
///
/// Whenever two consecutive samples differ by more than `pi` in magnitude,
/// the remainder of the series is shifted by the multiple of `2 pi` that
/// brings the difference back into `(-pi, pi]`. A jump of exactly `pi` is
/// left alone.
pub fn unwrap_series(phase: &mut [f64]) {
    let mut correction = 0.0;
    let mut prev_raw = match phase.first() {
        Some(&p) => p,
        None => return,
    };
    for p in phase.iter_mut().skip(1) {
        let raw = *p;
        let diff = raw - prev_raw;
        if diff.abs() > PI {
            // k such that diff - k*2pi lands in (-pi, pi]
            let k = ((diff - PI) / TAU).ceil();
            correction -= k * TAU;
        }
        prev_raw = raw;
        *p = raw + correction;
    }
}

/// Principal phase of every element, unwrapped along the snapshot axis.
pub fn unwrap_phase(t: &CsiTensor) -> PhaseTensor {
    let mut values = t.data().mapv(|z| z.arg());
    for mut lane in values.lanes_mut(Axis(2)) {
        let slice = lane
            .as_slice_mut()
            .expect("standard layout keeps snapshot lanes contiguous");
        unwrap_series(slice);
    }
    PhaseTensor { values }
}
