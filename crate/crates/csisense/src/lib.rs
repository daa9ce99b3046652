//! Moving-object classification from massive-MIMO channel snapshots.
//!
//! The pipeline turns a capture of `F` subcarriers x `M` RF chains x `N`
//! snapshots into a short eigenvalue feature vector and classifies it with a
//! linear SVM or a small feedforward network:
//!
//! 1. [`preprocess`]: resample onto a uniform time grid, wavelet-denoise the
//!    amplitude, unwrap the phase.
//! 2. [`features`]: windowed Gram-matrix spectra of the amplitude, and the
//!    spatial correlation spectrum of per-series phase residual variances.
//! 3. [`models`]: standardize, then train or predict.
//! 4. [`harness`]: cases, stratified splits, runs and reports.
//!
//! [`synth`] generates labelled captures with a multipath Doppler channel and
//! per-chain hardware impairments, and [`io`] reads and writes the binary
//! dataset format.
//!
//! ```
//! use csisense::synth::{generate_experiment, EventProfile, GenConfig, RfChainParams};
//! use csisense::features::{experiment_features, WindowConfig};
//! use csisense::types::Event;
//!
//! let cfg = GenConfig { subcarriers: 4, rf_chains: 8, snapshots: 200, ..GenConfig::default() };
//! let rf = RfChainParams::ideal(cfg.rf_chains, cfg.subcarriers);
//! let exp = generate_experiment(&cfg, &rf, &EventProfile::default_for(Event::V3))?;
//! let x = experiment_features(&exp.csi, &WindowConfig::default())?;
//! assert_eq!(x.len(), 12);
//! # Ok::<(), csisense::Error>(())
//! ```

pub mod error;
pub mod features;
pub mod harness;
pub mod io;
pub mod models;
pub mod preprocess;
pub mod synth;
pub mod types;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/signal-model.md")]
    mod signal_model {}
    #[doc = include_str!("../../../book/src/preprocessing.md")]
    mod preprocessing {}
    #[doc = include_str!("../../../book/src/amplitude-features.md")]
    mod amplitude_features {}
    #[doc = include_str!("../../../book/src/phase-features.md")]
    mod phase_features {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
