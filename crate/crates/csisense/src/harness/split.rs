use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CaseSpec;
use crate::error::{Error, Result};
use crate::types::{Dataset, Event};

/// Train and test positions into the list that was split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Number of test experiments drawn from each event of `spec`, given how many
/// experiments each event has.
///
/// Each event contributes `round(count * (1 - train_fraction))`, kept inside
/// `1..count` so both sides of the split see every event. When every event has
/// exactly [`CaseSpec::REFERENCE_PER_EVENT`] experiments and the case carries
/// reference margins, the per-side totals are pinned to those margins and
/// spread over the side's events by largest remainder (ties to the lower
/// event).
pub fn test_counts(
    spec: &CaseSpec,
    counts: &BTreeMap<Event, usize>,
) -> Result<BTreeMap<Event, usize>> {
    spec.validate()?;
    let test_frac = 1.0 - spec.train_fraction;
    let count = |e: &Event| counts.get(e).copied().unwrap_or(0);
    for (side, events) in [("positive", &spec.positive), ("negative", &spec.negative)] {
        let n: usize = events.iter().map(count).sum();
        if n < 2 {
            return Err(Error::arg(format!(
                "case {} needs at least 2 {side} experiments, found {n}",
                spec.id
            )));
        }
    }

    let reference = spec.reference_margins.filter(|_| {
        spec.events()
            .all(|e| count(&e) == CaseSpec::REFERENCE_PER_EVENT)
    });
    let mut out = BTreeMap::new();
    match reference {
        Some((neg, pos)) => {
            for (events, total) in [(&spec.negative, neg), (&spec.positive, pos)] {
                let ideal: Vec<(Event, f64)> = events
                    .iter()
                    .map(|&e| (e, count(&e) as f64 * test_frac))
                    .collect();
                let mut alloc: Vec<(Event, usize, f64)> = ideal
                    .iter()
                    .map(|&(e, x)| (e, x.floor() as usize, x - x.floor()))
                    .collect();
                let mut assigned: usize = alloc.iter().map(|a| a.1).sum();
                let mut order: Vec<usize> = (0..alloc.len()).collect();
                order.sort_by(|&a, &b| alloc[b].2.total_cmp(&alloc[a].2).then(a.cmp(&b)));
                let mut k = 0;
                while assigned < total {
                    alloc[order[k % order.len()]].1 += 1;
                    assigned += 1;
                    k += 1;
                }
                while assigned > total {
                    let i = order[order.len() - 1 - k % order.len()];
                    if alloc[i].1 > 0 {
                        alloc[i].1 -= 1;
                        assigned -= 1;
                    }
                    k += 1;
                }
                for (e, t, _) in alloc {
                    out.insert(e, t.min(count(&e)));
                }
            }
        }
        None => {
            for e in spec.events() {
                let c = count(&e);
                let t = (c as f64 * test_frac).round() as usize;
                out.insert(e, if c >= 2 { t.clamp(1, c - 1) } else { 0 });
            }
        }
    }
    Ok(out)
}

/// Stratified split of experiments labelled by `events`; positions of events
/// outside the case are dropped. Both halves are returned in ascending order.
pub fn split_events(events: &[Event], spec: &CaseSpec, seed: u64) -> Result<Split> {
    let mut groups: BTreeMap<Event, Vec<usize>> = BTreeMap::new();
    for (i, &e) in events.iter().enumerate() {
        if spec.label_of(e).is_some() {
            groups.entry(e).or_default().push(i);
        }
    }
    let counts = groups.iter().map(|(&e, v)| (e, v.len())).collect();
    let tests = test_counts(spec, &counts)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (e, mut idx) in groups {
        idx.shuffle(&mut rng);
        let t = tests[&e];
        test.extend_from_slice(&idx[..t]);
        train.extend_from_slice(&idx[t..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Stratified train/test split of a dataset's experiments.
pub fn split_dataset(d: &Dataset, spec: &CaseSpec, seed: u64) -> Result<Split> {
    let events: Vec<Event> = d.experiments.iter().map(|e| e.label).collect();
    split_events(&events, spec, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::uniform_counts;

    fn side_totals(spec: &CaseSpec, t: &BTreeMap<Event, usize>) -> (usize, usize) {
        let neg = spec.negative.iter().map(|e| t[e]).sum();
        let pos = spec.positive.iter().map(|e| t[e]).sum();
        (neg, pos)
    }

    #[test]
    fn reference_margins() {
        for (id, want) in [(1, (5, 13)), (2, (8, 3)), (3, (11, 4))] {
            let spec = CaseSpec::case(id).unwrap();
            let t = test_counts(&spec, &uniform_counts(18)).unwrap();
            assert_eq!(side_totals(&spec, &t), want, "case {id}");
        }
    }

    #[test]
    fn plain_rounding_for_other_sizes() {
        let spec = CaseSpec::case(1).unwrap();
        let t = test_counts(&spec, &uniform_counts(40)).unwrap();
        assert!(t.values().all(|&v| v == 8));
    }

    #[test]
    fn missing_side() {
        let spec = CaseSpec::case(2).unwrap();
        let mut counts = uniform_counts(10);
        counts.remove(&Event::V3);
        assert!(test_counts(&spec, &counts).is_err());
    }

    #[test]
    fn split_is_partition() {
        let spec = CaseSpec::case(3).unwrap();
        let events: Vec<Event> = Event::ALL.iter().flat_map(|&e| vec![e; 18]).collect();
        let s = split_events(&events, &spec, 11).unwrap();
        assert_eq!(s.test.len(), 15);
        assert_eq!(s.train.len() + s.test.len(), 72);
        assert!(s.test.iter().all(|i| !s.train.contains(i)));
        assert!(s.train.iter().all(|&i| events[i] != Event::V1));
    }
}
