//! Synthetic CSI generator.
//!
//! Each element is produced as
//!
//! ```text
//! Y[f, m, n] = H_f(m, n) * d_m * exp(j (alpha_m - n * eps[m, f])) + noise
//! ```
//!
//! where the channel `H_f` is a sum of complex exponentials: one static
//! component (strong under LOS, weak under NLOS) plus `num_paths` scattered
//! paths. A path with Doppler `nu`, delay `tau`, gain `g`, phase `phi` and
//! per-antenna phase `psi_m` contributes
//! `g * exp(j (2 pi nu t_n + phi + psi_m - 2 pi f_k tau))`, with `f_k` the
//! subcarrier frequency offset and `t_n` the (jittered) sample time.
//!
//! Generation is a pure function of its inputs and the seed. Corpus
//! experiments get independent seeds derived from a master seed, so any
//! experiment can be regenerated on its own.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CsiTensor, Dataset, Event, Experiment, Scenario};

/// Static component amplitude under line-of-sight.
const LOS_STATIC_GAIN: f64 = 1.0;
/// Static component amplitude when the direct path is blocked.
const NLOS_STATIC_GAIN: f64 = 0.3;
/// Jitter is clamped to this fraction of the snapshot period.
const JITTER_CLAMP: f64 = 0.45;

/// RF-chain response: amplitude scaling, initial phase and per-subcarrier CFO.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfChainParams {
    /// `d_m`, one per RF chain, strictly positive.
    pub amplitude: Vec<f64>,
    /// `alpha_m` in radians, one per RF chain.
    pub phase_offset: Vec<f64>,
    /// `eps[m][f]` in radians per snapshot.
    pub cfo: Vec<Vec<f64>>,
}

impl RfChainParams {
    /// Ideal chains: unit gain, zero phase offset, no CFO.
    pub fn ideal(rf_chains: usize, subcarriers: usize) -> Self {
        Self {
            amplitude: vec![1.0; rf_chains],
            phase_offset: vec![0.0; rf_chains],
            cfo: vec![vec![0.0; subcarriers]; rf_chains],
        }
    }

    /// Same CFO `eps` on every chain and subcarrier, otherwise ideal.
    pub fn uniform_cfo(rf_chains: usize, subcarriers: usize, eps: f64) -> Self {
        Self {
            cfo: vec![vec![eps; subcarriers]; rf_chains],
            ..Self::ideal(rf_chains, subcarriers)
        }
    }

    /// Draw `d ~ U[0.5, 2]`, `alpha ~ U[-pi, pi)`, `eps ~ U[-0.05, 0.05]`.
    pub fn random<R: Rng + ?Sized>(rf_chains: usize, subcarriers: usize, rng: &mut R) -> Self {
        let amplitude = (0..rf_chains)
            .map(|_| rng.random_range(0.5..=2.0))
            .collect();
        let phase_offset = (0..rf_chains).map(|_| rng.random_range(-PI..PI)).collect();
        let cfo = (0..rf_chains)
            .map(|_| {
                (0..subcarriers)
                    .map(|_| rng.random_range(-0.05..=0.05))
                    .collect()
            })
            .collect();
        Self {
            amplitude,
            phase_offset,
            cfo,
        }
    }

    pub fn validate(&self, rf_chains: usize, subcarriers: usize) -> Result<()> {
        if self.amplitude.len() != rf_chains || self.phase_offset.len() != rf_chains {
            return Err(Error::arg(format!(
                "RF parameters sized for {} chains, config has M={rf_chains}",
                self.amplitude.len()
            )));
        }
        if self.cfo.len() != rf_chains || self.cfo.iter().any(|row| row.len() != subcarriers) {
            return Err(Error::arg(format!(
                "CFO table must be {rf_chains}x{subcarriers}"
            )));
        }
        if self.amplitude.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
            return Err(Error::arg("RF amplitude scalings must be finite and > 0"));
        }
        let finite = self.phase_offset.iter().all(|a| a.is_finite())
            && self.cfo.iter().flatten().all(|e| e.is_finite());
        if !finite {
            return Err(Error::arg("RF phase offsets and CFOs must be finite"));
        }
        Ok(())
    }
}

/// Time-variation profile of one event class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventProfile {
    pub event: Event,
    /// Number of scattered paths on top of the static component.
    pub num_paths: usize,
    /// Doppler frequencies are drawn from `[-spread, +spread]` Hz.
    pub doppler_spread_hz: f64,
    /// Gain of path `p` is `path_gain * path_gain_decay^p`.
    pub path_gain_decay: f64,
    /// Fraction of the scattered paths that move.
    pub motion_richness: f64,
    /// Gain of the strongest scattered path.
    pub path_gain: f64,
    /// Path delays are drawn from `[0, max_delay_s]`.
    pub max_delay_s: f64,
}

impl EventProfile {
    /// Built-in profile for an event.
    ///
    /// The human activity gets many weak moving paths with a broad Doppler
    /// spread; the mechanical objects get a handful of stronger paths with
    /// narrower spreads.
    pub fn default_for(event: Event) -> Self {
        let (num_paths, doppler_spread_hz, path_gain_decay, motion_richness, path_gain) =
            match event {
                Event::V1 => (6, 0.0, 0.7, 0.0, 0.4),
                Event::V2 => (24, 8.0, 0.95, 1.0, 0.25),
                Event::V3 => (4, 5.0, 0.6, 0.5, 0.5),
                Event::V4 => (6, 3.0, 0.7, 0.5, 0.4),
                Event::V5 => (5, 6.0, 0.65, 0.8, 0.5),
            };
        Self {
            event,
            num_paths,
            doppler_spread_hz,
            path_gain_decay,
            motion_richness,
            path_gain,
            max_delay_s: 200e-9,
        }
    }

    /// Number of scattered paths that carry a Doppler shift.
    pub fn moving_paths(&self) -> usize {
        if self.doppler_spread_hz == 0.0 {
            return 0;
        }
        let k = (self.motion_richness * self.num_paths as f64).round() as usize;
        k.clamp(1, self.num_paths)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_paths == 0 {
            return Err(Error::arg("event profile needs at least one path"));
        }
        if self.event.is_static() && self.doppler_spread_hz != 0.0 {
            return Err(Error::arg("static event must have zero Doppler spread"));
        }
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !nonneg(self.doppler_spread_hz)
            || !nonneg(self.path_gain_decay)
            || !nonneg(self.path_gain)
            || !nonneg(self.max_delay_s)
            || !(0.0..=1.0).contains(&self.motion_richness)
        {
            return Err(Error::arg(format!(
                "event profile for {} has out-of-range parameters",
                self.event
            )));
        }
        Ok(())
    }
}

/// Capture geometry and impairments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub subcarriers: usize,
    pub rf_chains: usize,
    pub snapshots: usize,
    pub snapshot_rate_hz: f64,
    /// Standard deviation of the sampling-time jitter, seconds.
    pub jitter_std_s: f64,
    /// Per-component standard deviation of the complex Gaussian noise.
    pub noise_std: f64,
    pub subcarrier_spacing_hz: f64,
    pub scenario: Scenario,
    pub seed: u64,
}

impl Default for GenConfig {
    /// 100 subcarriers, 100 RF chains and 3000 snapshots over 30 s.
    fn default() -> Self {
        Self {
            subcarriers: 100,
            rf_chains: 100,
            snapshots: 3000,
            snapshot_rate_hz: 100.0,
            jitter_std_s: 1e-3,
            noise_std: 0.05,
            subcarrier_spacing_hz: 200e3,
            scenario: Scenario::Los,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subcarriers == 0 || self.rf_chains == 0 || self.snapshots == 0 {
            return Err(Error::arg("F, M and N must be positive"));
        }
        if !(self.snapshot_rate_hz.is_finite() && self.snapshot_rate_hz > 0.0) {
            return Err(Error::arg("snapshot rate must be positive"));
        }
        if !(self.jitter_std_s.is_finite() && self.jitter_std_s >= 0.0) {
            return Err(Error::arg("jitter std must be non-negative"));
        }
        if self.jitter_std_s >= 0.25 / self.snapshot_rate_hz {
            return Err(Error::arg(format!(
                "jitter std {} s must be below a quarter snapshot period ({} s)",
                self.jitter_std_s,
                0.25 / self.snapshot_rate_hz
            )));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::arg("noise std must be non-negative"));
        }
        if !self.subcarrier_spacing_hz.is_finite() {
            return Err(Error::arg("subcarrier spacing must be finite"));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer; a bijection on `u64`.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th stream under `master`. Distinct indices give
/// distinct seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Path {
    gain: f64,
    doppler_hz: f64,
    delay_s: f64,
    phase: f64,
    antenna_phase: Vec<f64>,
}

/// Generate one experiment.
pub fn generate_experiment(
    cfg: &GenConfig,
    rf: &RfChainParams,
    ev: &EventProfile,
) -> Result<Experiment> {
    cfg.validate()?;
    ev.validate()?;
    let (nf, nm, nn) = (cfg.subcarriers, cfg.rf_chains, cfg.snapshots);
    rf.validate(nm, nf)?;

    let mut rng = rng_stream(cfg.seed, 0);
    let period = 1.0 / cfg.snapshot_rate_hz;

    let timestamps: Vec<f64> = if cfg.jitter_std_s > 0.0 {
        let jitter = Normal::new(0.0, cfg.jitter_std_s).expect("validated std");
        let bound = JITTER_CLAMP * period;
        (0..nn)
            .map(|n| n as f64 * period + jitter.sample(&mut rng).clamp(-bound, bound))
            .collect()
    } else {
        (0..nn).map(|n| n as f64 * period).collect()
    };

    let static_gain = match cfg.scenario {
        Scenario::Los => LOS_STATIC_GAIN,
        Scenario::Nlos => NLOS_STATIC_GAIN,
    };
    let static_path = Path {
        gain: static_gain,
        doppler_hz: 0.0,
        delay_s: rng.random_range(0.0..=ev.max_delay_s),
        phase: 0.0,
        antenna_phase: (0..nm).map(|_| rng.random_range(-PI..PI)).collect(),
    };
    let moving = ev.moving_paths();
    let mut paths = vec![static_path];
    for p in 0..ev.num_paths {
        let doppler_hz = if p < moving {
            rng.random_range(-ev.doppler_spread_hz..=ev.doppler_spread_hz)
        } else {
            0.0
        };
        paths.push(Path {
            gain: ev.path_gain * ev.path_gain_decay.powi(p as i32),
            doppler_hz,
            delay_s: rng.random_range(0.0..=ev.max_delay_s),
            phase: rng.random_range(-PI..PI),
            antenna_phase: (0..nm).map(|_| rng.random_range(-PI..PI)).collect(),
        });
    }

    // Spatial-frequency response of one path at every (f, m).
    let footprint = |path: &Path| {
        Array2::from_shape_fn((nf, nm), |(f, m)| {
            let fk = f as f64 * cfg.subcarrier_spacing_hz;
            Complex64::from_polar(
                path.gain,
                path.phase + path.antenna_phase[m] - 2.0 * PI * fk * path.delay_s,
            )
        })
    };

    let mut static_part = Array2::<Complex64>::zeros((nf, nm));
    let mut dynamic = Vec::new();
    for path in &paths {
        if path.doppler_hz == 0.0 {
            static_part += &footprint(path);
        } else {
            let temporal: Vec<Complex64> = timestamps
                .iter()
                .map(|&t| Complex64::cis(2.0 * PI * path.doppler_hz * t))
                .collect();
            dynamic.push((footprint(path), temporal));
        }
    }

    let noise =
        (cfg.noise_std > 0.0).then(|| Normal::new(0.0, cfg.noise_std).expect("validated std"));
    let mut data = Array3::<Complex64>::zeros((nf, nm, nn));
    for f in 0..nf {
        for m in 0..nm {
            let d = rf.amplitude[m];
            let alpha = rf.phase_offset[m];
            let eps = rf.cfo[m][f];
            let s = static_part[[f, m]];
            for n in 0..nn {
                let mut h = s;
                for (shape, temporal) in &dynamic {
                    h += shape[[f, m]] * temporal[n];
                }
                let gamma = Complex64::from_polar(d, alpha - n as f64 * eps);
                data[[f, m, n]] = h * gamma;
            }
        }
    }
    if let Some(noise) = noise {
        for z in data.iter_mut() {
            let re = noise.sample(&mut rng);
            let im = noise.sample(&mut rng);
            *z += Complex64::new(re, im);
        }
    }

    Ok(Experiment {
        csi: CsiTensor::new(data, timestamps)?,
        label: ev.event,
        scenario: cfg.scenario,
        seed: cfg.seed,
    })
}

/// Requested number of experiments per event.
pub type EventCounts = BTreeMap<Event, usize>;

/// The same count for every event.
pub fn uniform_counts(per_event: usize) -> EventCounts {
    Event::ALL.iter().map(|&e| (e, per_event)).collect()
}

/// JSON-configurable corpus description consumed by `csisense generate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    /// Template configuration; its `seed` is the master seed.
    #[serde(default)]
    pub gen: GenConfig,
    /// Experiments per event, e.g. `{"v1": 18, "v2": 18}`.
    #[serde(default = "default_counts")]
    pub counts: EventCounts,
    /// Overrides of the built-in event profiles.
    #[serde(default)]
    pub profiles: Vec<EventProfile>,
    /// Fixed RF parameters for every experiment; drawn per experiment when absent.
    #[serde(default)]
    pub rf: Option<RfChainParams>,
}

fn default_counts() -> EventCounts {
    uniform_counts(18)
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            gen: GenConfig::default(),
            counts: default_counts(),
            profiles: Vec::new(),
            rf: None,
        }
    }
}

impl CorpusConfig {
    pub fn profile(&self, event: Event) -> EventProfile {
        self.profiles
            .iter()
            .find(|p| p.event == event)
            .cloned()
            .unwrap_or_else(|| EventProfile::default_for(event))
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Lazily generate the corpus, one experiment at a time, in event order.
    pub fn experiments(&self) -> impl Iterator<Item = Result<Experiment>> + '_ {
        let plan: Vec<Event> = self
            .counts
            .iter()
            .flat_map(|(&e, &c)| std::iter::repeat_n(e, c))
            .collect();
        plan.into_iter().enumerate().map(move |(k, event)| {
            let seed = derive_seed(self.gen.seed, k as u64);
            let cfg = GenConfig {
                seed,
                ..self.gen.clone()
            };
            let rf = match &self.rf {
                Some(rf) => rf.clone(),
                None => {
                    RfChainParams::random(cfg.rf_chains, cfg.subcarriers, &mut rng_stream(seed, 1))
                }
            };
            generate_experiment(&cfg, &rf, &self.profile(event))
        })
    }
}

/// Generate every experiment requested by `config`.
pub fn generate_corpus(config: &CorpusConfig) -> Result<Dataset> {
    let experiments = config.experiments().collect::<Result<Vec<_>>>()?;
    let mut d = Dataset::new(experiments);
    d.metadata
        .insert("generator".into(), "csisense synthetic".into());
    d.metadata
        .insert("master_seed".into(), config.gen.seed.to_string());
    Ok(d)
}
