mod common;

use std::collections::BTreeMap;

use csisense::harness::{
    accuracy, confusion_matrix, run_case, split_dataset, split_events, test_counts, CaseSpec,
    Report, ReportFormat, RunReport,
};
use csisense::models::{ModelKind, TrainConfig};
use csisense::synth::{generate_corpus, uniform_counts, CorpusConfig, GenConfig};
use csisense::types::{Dataset, Event, Scenario};
use proptest::prelude::*;

fn events(per_event: &[usize]) -> Vec<Event> {
    Event::ALL
        .iter()
        .zip(per_event)
        .flat_map(|(&e, &c)| vec![e; c])
        .collect()
}

fn side_sizes(spec: &CaseSpec, ev: &[Event], idx: &[usize]) -> (usize, usize) {
    let pos = idx
        .iter()
        .filter(|&&i| spec.label_of(ev[i]) == Some(1))
        .count();
    (idx.len() - pos, pos)
}

#[test]
fn reference_test_margins() {
    let ev = events(&[18; 5]);
    for (id, want) in [(1, (5, 13)), (2, (8, 3)), (3, (11, 4))] {
        let spec = CaseSpec::case(id).unwrap();
        for seed in 0..5 {
            let s = split_events(&ev, &spec, seed).unwrap();
            assert_eq!(side_sizes(&spec, &ev, &s.test), want, "case {id}");
        }
    }
}

#[test]
fn forty_per_event_is_plain_stratified() {
    let spec = CaseSpec::case(1).unwrap();
    let ev = events(&[40; 5]);
    let s = split_events(&ev, &spec, 1).unwrap();
    assert_eq!(s.test.len(), 40);
    assert_eq!(side_sizes(&spec, &ev, &s.test), (8, 32));
}

#[test]
fn empty_side_is_rejected() {
    let spec = CaseSpec::case(2).unwrap();
    let ev = events(&[5, 5, 0, 5, 5]);
    assert!(split_events(&ev, &spec, 0).is_err());
}

#[test]
fn confusion_layout() {
    let mut y_true = vec![0u8; 8];
    y_true.extend([1; 3]);
    let c = confusion_matrix(&y_true, &y_true).unwrap();
    assert_eq!(c, [[8, 0], [0, 3]]);
    assert_eq!(accuracy(&c), 1.0);
}

proptest! {
    #[test]
    fn split_partitions_and_stratifies(
        counts in proptest::collection::vec(2usize..30, 5),
        case in 1u8..=3,
        seed in any::<u64>(),
    ) {
        let spec = CaseSpec::case(case).unwrap();
        let ev = events(&counts);
        let s = split_events(&ev, &spec, seed).unwrap();
        let kept: Vec<usize> = (0..ev.len()).filter(|&i| spec.label_of(ev[i]).is_some()).collect();
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, kept);

        let per_event: BTreeMap<Event, usize> = spec.events().zip(spec.events().map(|e| counts[e.code() as usize - 1])).collect();
        let want = test_counts(&spec, &per_event).unwrap();
        for e in spec.events() {
            let got = s.test.iter().filter(|&&i| ev[i] == e).count();
            prop_assert_eq!(got, want[&e]);
        }
    }

    #[test]
    fn accuracy_equals_direct_mean(pairs in proptest::collection::vec((0u8..2, 0u8..2), 1..100)) {
        let (t, p): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let c = confusion_matrix(&t, &p).unwrap();
        let direct = t.iter().zip(&p).filter(|(a, b)| a == b).count() as f64 / t.len() as f64;
        prop_assert_eq!(c.iter().flatten().sum::<usize>(), t.len());
        prop_assert!((accuracy(&c) - direct).abs() < 1e-15);
    }
}

fn clean_corpus() -> Dataset {
    generate_corpus(&CorpusConfig {
        gen: GenConfig {
            subcarriers: 4,
            rf_chains: 8,
            snapshots: 200,
            noise_std: 0.0,
            seed: 31,
            ..GenConfig::default()
        },
        counts: uniform_counts(18),
        ..CorpusConfig::default()
    })
    .unwrap()
}

#[test]
fn separable_corpus_is_classified_perfectly() {
    let d = clean_corpus();
    let spec = CaseSpec::case(1).unwrap();
    let cfg = TrainConfig {
        epochs: 100,
        ..TrainConfig::default()
    };
    for kind in ModelKind::ALL {
        let r = run_case(&d, &spec, kind, &None, 4, &cfg).unwrap();
        assert_eq!(r.confusion, [[5, 0], [0, 13]], "{kind}");
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.test_size, 18);
        assert_eq!(r.train_size, 72);
        assert_eq!(r.scenario, Some(Scenario::Los));
        let split = split_dataset(&d, &spec, csisense::synth::derive_seed(4, 0)).unwrap();
        assert_eq!(
            split.test.len(),
            r.confusion.iter().flatten().sum::<usize>()
        );
    }
}

#[test]
fn runs_are_deterministic_and_report_antennas() {
    let d = clean_corpus();
    let spec = CaseSpec::case(2).unwrap();
    let cfg = TrainConfig {
        epochs: 20,
        ..TrainConfig::default()
    };
    let sel = Some(vec![0, 2, 4]);
    let a = run_case(&d, &spec, ModelKind::Nn, &sel, 9, &cfg).unwrap();
    let b = run_case(&d, &spec, ModelKind::Nn, &sel, 9, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.antennas, Some(vec![1, 3, 5]));
    assert_eq!(a.rf_chains, 3);
    assert_eq!(a.test_size, 11);
}

#[test]
fn out_of_range_antenna_is_stage_tagged() {
    let d = clean_corpus();
    let err = run_case(
        &d,
        &CaseSpec::case(1).unwrap(),
        ModelKind::Svm,
        &Some(vec![8]),
        0,
        &TrainConfig::default(),
    )
    .unwrap_err();
    assert!(err.to_string().starts_with("[select antennas]"), "{err}");
}

#[test]
fn report_json_round_trip() {
    let runs = vec![
        RunReport {
            case: 1,
            scenario: None,
            model: ModelKind::Nn,
            antennas: None,
            rf_chains: 16,
            seed: 0,
            train_size: 160,
            test_size: 40,
            confusion: [[7, 1], [0, 32]],
            accuracy: 39.0 / 40.0,
        },
        RunReport {
            case: 1,
            scenario: None,
            model: ModelKind::Nn,
            antennas: None,
            rf_chains: 16,
            seed: 1,
            train_size: 160,
            test_size: 40,
            confusion: [[8, 0], [1, 31]],
            accuracy: 39.0 / 40.0,
        },
    ];
    let r = Report::new(runs).unwrap();
    assert_eq!(r.summaries.len(), 1);
    assert_eq!(r.summaries[0].std, 0.0);
    let json = r.render(ReportFormat::Json).unwrap();
    let back = Report::from_json(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.render(ReportFormat::Json).unwrap(), json);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in [
        "case",
        "scenario",
        "model",
        "antennas",
        "rf_chains",
        "seed",
        "train_size",
        "test_size",
        "confusion",
        "accuracy",
    ] {
        assert!(v["runs"][0].get(key).is_some(), "missing {key}");
    }
    assert!(r.render(ReportFormat::Text).unwrap().contains("+/-"));
}
