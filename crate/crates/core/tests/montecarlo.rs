use itertools::Itertools;

use prophet_core::engine::secretary_acceptance;
use prophet_core::exact::evaluate_exact;
use prophet_core::instances::gen_075_hard;
use prophet_core::montecarlo::{estimate, estimate_secretary};
use prophet_core::schedule::theorem1_schedule;
use prophet_core::{DiscreteDistribution, Instance};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn identical_across_thread_counts() {
    let inst = gen_075_hard(0.1).unwrap();
    let sched = theorem1_schedule(2, inst.opt()).unwrap();
    let one = in_pool(1, || estimate(&inst, &sched, 50_000, 99).unwrap());
    let four = in_pool(4, || estimate(&inst, &sched, 50_000, 99).unwrap());
    assert_eq!(one, four);
    let sec_one = in_pool(1, || estimate_secretary(&inst, 20_000, 5).unwrap());
    let sec_four = in_pool(4, || estimate_secretary(&inst, 20_000, 5).unwrap());
    assert_eq!(sec_one, sec_four);
}

#[test]
fn large_run_brackets_exact_value() {
    let inst = gen_075_hard(0.01).unwrap();
    let sched = theorem1_schedule(2, inst.opt()).unwrap();
    let exact = evaluate_exact(&inst, &sched).unwrap().alg_value;
    let mc = estimate(&inst, &sched, 1_000_000, 31337).unwrap();
    assert!(mc.contains(exact), "{mc:?} vs {exact}");
    // The 1/eps atom carries most of the variance: sd is about 10.
    assert!(mc.half_width_95 < 0.025, "{mc:?}");
}

#[test]
fn secretary_matches_permutation_average() {
    let values = [1.0, 2.0, 3.0, 4.0, 5.0];
    let inst = Instance::maximize(
        "distinct",
        values
            .iter()
            .map(|&v| DiscreteDistribution::point_mass(v).unwrap())
            .collect(),
    )
    .unwrap();
    let perms: Vec<Vec<f64>> = values.iter().copied().permutations(5).collect();
    let exact = perms
        .iter()
        .map(|arr| secretary_acceptance(arr).unwrap().map_or(0.0, |k| arr[k - 1]))
        .sum::<f64>()
        / perms.len() as f64;
    let mc = estimate_secretary(&inst, 400_000, 8).unwrap();
    assert!(mc.contains(exact), "{mc:?} vs {exact}");
}
