//! Frozen RNG and episode vectors, produced by a separate pure-Python ChaCha8
//! implementation of the stream derivation documented in `rng`.

use std::collections::HashMap;

use prophet_core::engine::{run_once, run_once_stream};
use prophet_core::rng::StreamRng;
use prophet_core::schedule::uniform_schedule;
use prophet_core::{DiscreteDistribution, Instance, ThresholdSchedule};

#[test]
fn raw_stream_vectors() {
    let mut r = StreamRng::new(42, 0);
    let got: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
    assert_eq!(got, [6424161053832095879, 5270208426312333099, 9102960255288774902]);

    let mut r = StreamRng::new(42, 7);
    let got: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
    assert_eq!(got, [3425180178688264041, 10705747601317740447, 17437786863798683455]);
}

#[test]
fn derived_draw_vectors() {
    let mut r = StreamRng::new(1, 0);
    let got: Vec<f64> = (0..3).map(|_| r.uniform()).collect();
    assert_eq!(got, [0.381489413238261, 0.2949273257816749, 0.7982542473815959]);

    let mut r = StreamRng::new(9, 3);
    let got: Vec<u64> = (0..8).map(|_| r.below(10)).collect();
    assert_eq!(got, [6, 0, 5, 8, 8, 3, 7, 2]);

    let mut r = StreamRng::new(5, 0);
    let mut items: Vec<usize> = (0..6).collect();
    r.shuffle(&mut items);
    assert_eq!(items, [0, 2, 1, 5, 3, 4]);
}

fn mixed() -> Instance {
    let d = |pairs: &[(f64, f64)]| DiscreteDistribution::new(pairs.iter().copied()).unwrap();
    Instance::maximize(
        "mixed",
        vec![
            d(&[(1.0, 1.0)]),
            d(&[(0.0, 0.5), (2.0, 0.5)]),
            d(&[(0.5, 0.25), (1.5, 0.5), (4.0, 0.25)]),
        ],
    )
    .unwrap()
}

#[test]
fn run_once_vectors() {
    let inst = mixed();
    let sched = ThresholdSchedule::from_values(&[1.5, 1.0, 0.5]).unwrap();
    // (seed, drawn values, permutation, stop step, chosen value)
    type Case = (u64, [f64; 3], [usize; 3], Option<usize>, f64);
    let cases: [Case; 5] = [
        (0, [1.0, 2.0, 0.5], [2, 0, 1], Some(2), 1.0),
        (1, [1.0, 0.0, 4.0], [2, 0, 1], Some(1), 4.0),
        (2, [1.0, 0.0, 1.5], [1, 2, 0], Some(2), 1.5),
        (3, [1.0, 0.0, 1.5], [2, 0, 1], Some(1), 1.5),
        (123456789, [1.0, 0.0, 1.5], [0, 2, 1], Some(2), 1.5),
    ];
    for (seed, drawn, perm, stop, chosen) in cases {
        let out = run_once(&inst, &sched, seed).unwrap();
        assert_eq!(out.drawn_values, drawn, "seed {seed}");
        assert_eq!(out.permutation, perm, "seed {seed}");
        assert_eq!(out.stop_step, stop, "seed {seed}");
        assert_eq!(out.chosen_value, chosen, "seed {seed}");
        assert!(out.is_first_crossing(&sched));
    }
}

#[test]
fn permutations_are_uniform() {
    let d = DiscreteDistribution::point_mass(1.0).unwrap();
    let inst = Instance::maximize("flat", vec![d; 4]).unwrap();
    let sched = uniform_schedule(4, 0.0).unwrap();
    let runs = 1_000_000u64;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for t in 0..runs {
        let out = run_once_stream(&inst, &sched, 2024, t).unwrap();
        *counts.entry(out.permutation).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let p = 1.0 / 24.0;
    let mean = runs as f64 * p;
    let sigma = (runs as f64 * p * (1.0 - p)).sqrt();
    for (perm, c) in &counts {
        assert!((*c as f64 - mean).abs() <= 5.0 * sigma, "{perm:?}: {c} vs {mean}");
    }
}
