//! Domain types shared by the whole pipeline: the CSI tensor, labeled
//! experiments, and the dataset container.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array3, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Event taxonomy of the measurement campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Event {
    /// Static environment.
    #[serde(rename = "v1")]
    V1,
    /// Human dancing.
    #[serde(rename = "v2")]
    V2,
    /// Spinning bike wheel.
    #[serde(rename = "v3")]
    V3,
    /// Waving an aluminium foil balloon.
    #[serde(rename = "v4")]
    V4,
    /// Spinning and moving bike wheel.
    #[serde(rename = "v5")]
    V5,
}

impl Event {
    pub const ALL: [Event; 5] = [Event::V1, Event::V2, Event::V3, Event::V4, Event::V5];

    /// Numeric code 1..=5 used by the binary dataset format.
    pub fn code(self) -> u8 {
        match self {
            Event::V1 => 1,
            Event::V2 => 2,
            Event::V3 => 3,
            Event::V4 => 4,
            Event::V5 => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Event> {
        match code {
            1 => Some(Event::V1),
            2 => Some(Event::V2),
            3 => Some(Event::V3),
            4 => Some(Event::V4),
            5 => Some(Event::V5),
            _ => None,
        }
    }

    pub fn is_static(self) -> bool {
        self == Event::V1
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.code())
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let code = s
            .trim()
            .trim_start_matches(['v', 'V'])
            .parse::<u8>()
            .ok()
            .and_then(Event::from_code);
        code.ok_or_else(|| Error::arg(format!("unknown event `{s}` (expected v1..v5)")))
    }
}

/// Propagation scenario between user equipment and base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

impl Scenario {
    pub fn code(self) -> u8 {
        match self {
            Scenario::Los => 0,
            Scenario::Nlos => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Scenario> {
        match code {
            0 => Some(Scenario::Los),
            1 => Some(Scenario::Nlos),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Los => "LOS",
            Scenario::Nlos => "NLOS",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LOS" => Ok(Scenario::Los),
            "NLOS" => Ok(Scenario::Nlos),
            _ => Err(Error::arg(format!(
                "unknown scenario `{s}` (expected LOS or NLOS)"
            ))),
        }
    }
}

/// Received channel snapshots, indexed `[subcarrier, rf_chain, snapshot]`.
///
/// Snapshots carry their own timestamps (seconds) so that jittered sampling
/// can be represented before resampling. Construction validates that the
/// timestamps are strictly increasing and that every element is finite; the
/// tensor is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTensor {
    data: Array3<Complex64>,
    timestamps: Vec<f64>,
}

impl CsiTensor {
    pub fn new(data: Array3<Complex64>, timestamps: Vec<f64>) -> Result<Self> {
        let (f, m, n) = data.dim();
        if f == 0 || m == 0 || n == 0 {
            return Err(Error::arg(format!(
                "CSI dimensions must be positive, got F={f}, M={m}, N={n}"
            )));
        }
        if timestamps.len() != n {
            return Err(Error::arg(format!(
                "expected {n} timestamps, got {}",
                timestamps.len()
            )));
        }
        if timestamps.iter().any(|t| !t.is_finite()) {
            return Err(Error::arg("timestamps must be finite"));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::arg(format!(
                "timestamps not strictly increasing at snapshot {}",
                i + 1
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("CSI contains non-finite values"));
        }
        // Normalize to standard layout so flat iteration matches f, m, n order.
        let data = if data.is_standard_layout() {
            data
        } else {
            data.as_standard_layout().into_owned()
        };
        Ok(Self { data, timestamps })
    }

    /// Number of subcarriers.
    pub fn subcarriers(&self) -> usize {
        self.data.dim().0
    }

    /// Number of RF chains.
    pub fn rf_chains(&self) -> usize {
        self.data.dim().1
    }

    /// Number of snapshots.
    pub fn snapshots(&self) -> usize {
        self.data.dim().2
    }

    /// `(F, M, N)`.
    pub fn dim(&self) -> (usize, usize, usize) {
        self.data.dim()
    }

    pub fn data(&self) -> &Array3<Complex64> {
        &self.data
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn into_parts(self) -> (Array3<Complex64>, Vec<f64>) {
        (self.data, self.timestamps)
    }

    /// Keep only the RF chains listed in `indices` (0-based), in that order.
    ///
    /// Output chain `i` is input chain `indices[i]`; timestamps are unchanged.
    pub fn select_antennas(&self, indices: &[usize]) -> Result<CsiTensor> {
        let m = self.rf_chains();
        if indices.is_empty() {
            return Err(Error::arg("antenna subset must not be empty"));
        }
        let mut seen = vec![false; m];
        for &i in indices {
            if i >= m {
                return Err(Error::arg(format!(
                    "antenna index {} out of range 1..={m}",
                    i + 1
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::arg(format!("duplicate antenna index {}", i + 1)));
            }
        }
        let data = self.data.select(Axis(1), indices);
        Ok(CsiTensor {
            data,
            timestamps: self.timestamps.clone(),
        })
    }
}

/// One labeled capture.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub csi: CsiTensor,
    pub label: Event,
    pub scenario: Scenario,
    /// Generator seed, or [`Experiment::MEASURED`] for captured data.
    pub seed: u64,
}

impl Experiment {
    /// Seed value reserved for experiments that were measured, not generated.
    pub const MEASURED: u64 = u64::MAX;

    pub fn is_measured(&self) -> bool {
        self.seed == Self::MEASURED
    }
}

/// Ordered collection of experiments plus free-form metadata.
///
/// Metadata is carried in memory only; the binary dataset format stores the
/// experiments alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub experiments: Vec<Experiment>,
    pub metadata: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(experiments: Vec<Experiment>) -> Self {
        Self {
            experiments,
            metadata: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.experiments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experiments.is_empty()
    }

    /// Number of experiments per event label.
    pub fn counts(&self) -> BTreeMap<Event, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.experiments {
            *counts.entry(e.label).or_insert(0) += 1;
        }
        counts
    }

    /// Check that every experiment has the same number of subcarriers and RF chains.
    pub fn check_consistent(&self) -> Result<()> {
        let mut dims = self.experiments.iter().map(|e| {
            let (f, m, _) = e.csi.dim();
            (f, m)
        });
        if let Some(first) = dims.next() {
            if let Some(other) = dims.find(|d| *d != first) {
                return Err(Error::arg(format!(
                    "inconsistent experiment dimensions: (F, M) = {first:?} vs {other:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Parse an antenna list of the form `1,2,3` (1-based) or `all`.
///
/// Returns 0-based indices, or `None` for `all`.
pub fn parse_antenna_list(spec: &str) -> Result<Option<Vec<usize>>> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    spec.split(',')
        .map(|tok| {
            let i: usize = tok
                .trim()
                .parse()
                .map_err(|_| Error::arg(format!("bad antenna index `{tok}`")))?;
            if i == 0 {
                return Err(Error::arg("antenna indices are 1-based"));
            }
            Ok(i - 1)
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    fn tensor(f: usize, m: usize, n: usize) -> CsiTensor {
        let data = Array3::from_shape_fn((f, m, n), |(a, b, c)| {
            Complex64::new((100 * a + 10 * b + c) as f64, -(c as f64))
        });
        let ts = (0..n).map(|i| i as f64 * 0.01).collect();
        CsiTensor::new(data, ts).unwrap()
    }

    #[test]
    fn rejects_non_monotone_timestamps() {
        let data = Array3::zeros((1, 1, 3));
        let err = CsiTensor::new(data, vec![0.0, 0.02, 0.02]).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"));
    }

    #[test]
    fn rejects_nan() {
        let mut data = Array3::zeros((1, 1, 2));
        data[[0, 0, 1]] = Complex64::new(0.0, f64::NAN);
        assert!(CsiTensor::new(data, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn full_subset_is_identity() {
        let t = tensor(2, 4, 3);
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(t.select_antennas(&all).unwrap(), t);
    }

    #[test]
    fn reorders_chains() {
        let t = tensor(1, 3, 1);
        let s = t.select_antennas(&[2, 0]).unwrap();
        assert_eq!(s.dim(), (1, 2, 1));
        assert_eq!(s.data()[[0, 0, 0]], t.data()[[0, 2, 0]]);
        assert_eq!(s.data()[[0, 1, 0]], t.data()[[0, 0, 0]]);
    }

    #[test]
    fn subset_errors() {
        let t = tensor(1, 3, 2);
        assert!(t.select_antennas(&[0, 0]).is_err());
        assert!(t.select_antennas(&[3]).is_err());
        assert!(t.select_antennas(&[]).is_err());
    }

    #[test]
    fn event_codes_round_trip() {
        for e in Event::ALL {
            assert_eq!(Event::from_code(e.code()), Some(e));
            assert_eq!(e.to_string().parse::<Event>().unwrap(), e);
        }
        assert!(Event::from_code(0).is_none());
        assert!(Event::from_code(6).is_none());
    }

    #[test]
    fn antenna_list_parsing() {
        assert_eq!(parse_antenna_list("all").unwrap(), None);
        assert_eq!(parse_antenna_list("1,2, 3").unwrap(), Some(vec![0, 1, 2]));
        assert!(parse_antenna_list("0,1").is_err());
        assert!(parse_antenna_list("a").is_err());
    }
}
