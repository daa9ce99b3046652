use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::WindowConfig;
use crate::types::Event;

/// One binary classification task over the event catalogue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub id: u8,
    /// Events labelled `1`.
    pub positive: BTreeSet<Event>,
    /// Events labelled `0`.
    pub negative: BTreeSet<Event>,
    pub train_fraction: f64,
    /// `(k_amplitude, k_phase)`.
    pub feature_dims: (usize, usize),
    /// Test-set sizes `(negatives, positives)` of the reference evaluation,
    /// reproduced when every event in the case has
    /// [`CaseSpec::REFERENCE_PER_EVENT`] experiments.
    pub reference_margins: Option<(usize, usize)>,
}

impl CaseSpec {
    pub const REFERENCE_PER_EVENT: usize = 18;

    /// The three predefined cases.
    pub fn case(id: u8) -> Result<Self> {
        use Event::*;
        type Row = (
            &'static [Event],
            &'static [Event],
            f64,
            (usize, usize),
            (usize, usize),
        );
        let (pos, neg, frac, dims, margins): Row = match id {
            1 => (&[V2, V3, V4, V5], &[V1], 0.8, (6, 6), (5, 13)),
            2 => (&[V2], &[V3], 0.7, (2, 2), (8, 3)),
            3 => (&[V2], &[V3, V4, V5], 0.8, (6, 6), (11, 4)),
            _ => return Err(Error::arg(format!("unknown case {id}, expected 1, 2 or 3"))),
        };
        Ok(Self {
            id,
            positive: pos.iter().copied().collect(),
            negative: neg.iter().copied().collect(),
            train_fraction: frac,
            feature_dims: dims,
            reference_margins: Some(margins),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.positive.is_empty() || self.negative.is_empty() {
            return Err(Error::arg("both sides of a case need at least one event"));
        }
        if !self.positive.is_disjoint(&self.negative) {
            return Err(Error::arg("an event cannot be on both sides of a case"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::arg(format!(
                "train fraction {} must lie in (0, 1)",
                self.train_fraction
            )));
        }
        if self.feature_dims.0 == 0 || self.feature_dims.1 == 0 {
            return Err(Error::arg("feature dimensions must be positive"));
        }
        Ok(())
    }

    /// Binary label of `event`, or `None` when the case ignores it.
    pub fn label_of(&self, event: Event) -> Option<u8> {
        if self.positive.contains(&event) {
            Some(1)
        } else if self.negative.contains(&event) {
            Some(0)
        } else {
            None
        }
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.negative.iter().chain(&self.positive).copied()
    }

    pub fn window_config(&self) -> WindowConfig {
        WindowConfig::with_dims(self.feature_dims.0, self.feature_dims.1)
    }
}
