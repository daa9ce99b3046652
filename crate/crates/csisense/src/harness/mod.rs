//! Case construction, splitting, end-to-end runs and reports.

mod case;
mod report;
mod split;

use ndarray::{Array2, Axis};

pub use case::CaseSpec;
pub use report::{
    accuracy, confusion_matrix, AccuracySummary, Confusion, Report, ReportFormat, RunReport,
};
pub use split::{split_dataset, split_events, test_counts, Split};

use crate::error::{Error, Result, StageExt};
use crate::features::{experiment_features, WindowConfig};
use crate::models::{Classifier, ModelKind, TrainConfig};
use crate::synth::derive_seed;
use crate::types::{Dataset, Event, Experiment, Scenario};

/// Largest per-feature eigenvalue count any predefined case uses. Smaller
/// cases read a prefix of each block.
pub const MAX_FEATURE_DIMS: (usize, usize) = (6, 6);

/// Antenna selection, 0-based; `None` keeps the full array.
pub type Antennas = Option<Vec<usize>>;

/// Extracted features for every experiment of a dataset under one antenna
/// selection.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub events: Vec<Event>,
    pub scenarios: Vec<Scenario>,
    /// One row per experiment: `k_amplitude` then `k_phase` columns.
    pub rows: Array2<f64>,
    pub dims: (usize, usize),
    pub antennas: Antennas,
    pub rf_chains: usize,
}

impl FeatureTable {
    /// Project onto the first `dims.0` amplitude and `dims.1` phase columns.
    pub fn project(&self, dims: (usize, usize)) -> Result<Array2<f64>> {
        if dims.0 > self.dims.0 || dims.1 > self.dims.1 {
            return Err(Error::arg(format!(
                "table holds {:?} features, {:?} requested",
                self.dims, dims
            )));
        }
        let cols: Vec<usize> = (0..dims.0)
            .chain(self.dims.0..self.dims.0 + dims.1)
            .collect();
        Ok(self.rows.select(Axis(1), &cols))
    }
}

fn check_antennas(antennas: &Antennas) -> Result<()> {
    match antennas {
        Some(a) if a.is_empty() => Err(Error::arg("antenna list is empty")),
        _ => Ok(()),
    }
}

/// Build one feature table per antenna selection while visiting each
/// experiment once. Raw captures are dropped as soon as their features exist,
/// so a lazily generated corpus never has to fit in memory.
pub fn feature_tables<I>(
    experiments: I,
    selections: &[Antennas],
    w: &WindowConfig,
) -> Result<Vec<FeatureTable>>
where
    I: IntoIterator<Item = Result<Experiment>>,
{
    w.validate()?;
    selections.iter().try_for_each(check_antennas)?;
    let width = w.k_amplitude + w.k_phase;
    let mut events = Vec::new();
    let mut scenarios = Vec::new();
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); selections.len()];
    let mut rf_chains: Vec<Option<usize>> = vec![None; selections.len()];
    for exp in experiments {
        let exp = exp.stage("load experiment")?;
        for (k, sel) in selections.iter().enumerate() {
            let features = match sel {
                Some(idx) => {
                    let csi = exp.csi.select_antennas(idx).stage("select antennas")?;
                    experiment_features(&csi, w)?
                }
                None => experiment_features(&exp.csi, w)?,
            };
            let m = sel.as_ref().map_or(exp.csi.rf_chains(), Vec::len);
            match rf_chains[k] {
                None => rf_chains[k] = Some(m),
                Some(prev) if prev != m => {
                    return Err(Error::arg("experiments have different array sizes")
                        .in_stage("select antennas"))
                }
                _ => {}
            }
            data[k].extend_from_slice(features.as_slice());
        }
        events.push(exp.label);
        scenarios.push(exp.scenario);
    }
    let n = events.len();
    selections
        .iter()
        .zip(data)
        .zip(rf_chains)
        .map(|((sel, flat), m)| {
            Ok(FeatureTable {
                events: events.clone(),
                scenarios: scenarios.clone(),
                rows: Array2::from_shape_vec((n, width), flat).expect("row width"),
                dims: (w.k_amplitude, w.k_phase),
                antennas: sel.clone(),
                rf_chains: m.unwrap_or(0),
            })
        })
        .collect()
}

/// Features of every experiment in `d` under a single antenna selection.
pub fn feature_table(d: &Dataset, antennas: &Antennas, w: &WindowConfig) -> Result<FeatureTable> {
    let mut t = feature_tables(
        d.experiments.iter().cloned().map(Ok),
        std::slice::from_ref(antennas),
        w,
    )?;
    Ok(t.pop().expect("one selection"))
}

/// Seeds derived from a run seed: one for the split, one for training.
fn run_seeds(seed: u64) -> (u64, u64) {
    (derive_seed(seed, 0), derive_seed(seed, 1))
}

/// The case's feature matrix and binary labels for the given positions.
fn case_rows(t: &FeatureTable, spec: &CaseSpec, idx: &[usize]) -> Result<(Array2<f64>, Vec<u8>)> {
    let x = t.project(spec.feature_dims)?.select(Axis(0), idx);
    let y = idx
        .iter()
        .map(|&i| spec.label_of(t.events[i]).expect("split keeps case events"))
        .collect();
    Ok((x, y))
}

/// Train and evaluate several models on one shared split.
///
/// `seed` fixes both the split and every model's initialization and shuffling.
pub fn run_models_on_features(
    t: &FeatureTable,
    spec: &CaseSpec,
    kinds: &[ModelKind],
    seed: u64,
    cfg: &TrainConfig,
) -> Result<Vec<RunReport>> {
    spec.validate().stage("case")?;
    let (split_seed, train_seed) = run_seeds(seed);
    let split = split_events(&t.events, spec, split_seed).stage("split")?;
    let (x_train, y_train) = case_rows(t, spec, &split.train).stage("split")?;
    let (x_test, y_test) = case_rows(t, spec, &split.test).stage("split")?;
    let cfg = TrainConfig {
        seed: train_seed,
        ..cfg.clone()
    };

    let mut scen = split
        .train
        .iter()
        .chain(&split.test)
        .map(|&i| t.scenarios[i]);
    let first = scen.next();
    let scenario = if scen.all(|s| Some(s) == first) {
        first
    } else {
        None
    };

    kinds
        .iter()
        .map(|&kind| {
            let model = Classifier::train(kind, &x_train, &y_train, &cfg).stage("train")?;
            let pred = model.predict_batch(&x_test).stage("evaluate")?;
            let confusion = confusion_matrix(&y_test, &pred).stage("evaluate")?;
            Ok(RunReport {
                case: spec.id,
                scenario,
                model: kind,
                antennas: t
                    .antennas
                    .as_ref()
                    .map(|a| a.iter().map(|i| i + 1).collect()),
                rf_chains: t.rf_chains,
                seed,
                train_size: split.train.len(),
                test_size: split.test.len(),
                accuracy: accuracy(&confusion),
                confusion,
            })
        })
        .collect()
}

/// Single-model run on precomputed features.
pub fn run_on_features(
    t: &FeatureTable,
    spec: &CaseSpec,
    kind: ModelKind,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunReport> {
    Ok(run_models_on_features(t, spec, &[kind], seed, cfg)?.remove(0))
}

/// Full pipeline for one case: select antennas, extract features, split,
/// train and evaluate.
pub fn run_case(
    d: &Dataset,
    spec: &CaseSpec,
    kind: ModelKind,
    antennas: &Antennas,
    seed: u64,
    cfg: &TrainConfig,
) -> Result<RunReport> {
    let t = feature_table(
        d,
        antennas,
        &WindowConfig::with_dims(MAX_FEATURE_DIMS.0, MAX_FEATURE_DIMS.1),
    )?;
    run_on_features(&t, spec, kind, seed, cfg)
}

/// Runs for `seeds` consecutive seeds starting at `seed`, every model sharing
/// each split.
pub fn run_seeds_on_features(
    t: &FeatureTable,
    spec: &CaseSpec,
    kinds: &[ModelKind],
    seed: u64,
    seeds: usize,
    cfg: &TrainConfig,
) -> Result<Vec<RunReport>> {
    let mut out = Vec::new();
    for s in 0..seeds as u64 {
        out.extend(run_models_on_features(
            t,
            spec,
            kinds,
            seed.wrapping_add(s),
            cfg,
        )?);
    }
    Ok(out)
}

/// The first `k` antennas, for each `k` in `counts`.
pub fn prefix_selections(counts: &[usize]) -> Vec<Antennas> {
    counts.iter().map(|&k| Some((0..k).collect())).collect()
}

/// Accuracy against array size: every count uses the first `k` antennas and
/// the same seeds, so the comparison is paired.
pub fn ablate(
    d: &Dataset,
    spec: &CaseSpec,
    kinds: &[ModelKind],
    antenna_counts: &[usize],
    seed: u64,
    seeds: usize,
    cfg: &TrainConfig,
) -> Result<Report> {
    let w = WindowConfig::with_dims(MAX_FEATURE_DIMS.0, MAX_FEATURE_DIMS.1);
    let tables = feature_tables(
        d.experiments.iter().cloned().map(Ok),
        &prefix_selections(antenna_counts),
        &w,
    )?;
    let mut runs = Vec::new();
    for t in &tables {
        runs.extend(run_seeds_on_features(t, spec, kinds, seed, seeds, cfg)?);
    }
    Report::new(runs)
}
