use proptest::prelude::*;

use prophet_core::benchmark::{optimal_online_max, optimal_online_min, threshold_policy_min};
use prophet_core::distribution::max_tail_integral;
use prophet_core::exact::{evaluate_bruteforce, evaluate_exact, theta_lower_bound};
use prophet_core::instances::{random_instance, random_non_increasing_schedule};
use prophet_core::rng::StreamRng;
use prophet_core::schedule::{theorem1_schedule, uniform_schedule};
use prophet_core::{Instance, ThresholdSchedule};

fn case(seed: u64, max_n: u64) -> (Instance, ThresholdSchedule) {
    let mut rng = StreamRng::new(seed, 0);
    let n = 1 + rng.below(max_n) as usize;
    let inst = random_instance(&mut rng, n, 3);
    let sched = random_non_increasing_schedule(&mut rng, &inst);
    (inst, sched)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tail_integral_above_each_threshold(seed in any::<u64>()) {
        let (inst, _) = case(seed, 8);
        let opt = inst.opt();
        let sched = theorem1_schedule(inst.len(), opt).unwrap();
        for (k, a) in sched.factors().unwrap().iter().enumerate() {
            let tau = sched.threshold(k + 1).as_f64();
            let tail = max_tail_integral(inst.distributions(), tau);
            prop_assert!(tail >= (1.0 - a) * opt - 1e-9, "k={} tail {} vs {}", k + 1, tail, (1.0 - a) * opt);
        }
    }

    #[test]
    fn value_above_theta_bound(seed in any::<u64>()) {
        let (inst, _) = case(seed, 8);
        let sched = theorem1_schedule(inst.len(), inst.opt()).unwrap();
        let report = evaluate_exact(&inst, &sched).unwrap();
        let bound = theta_lower_bound(&report, sched.factors().unwrap());
        prop_assert!(report.alg_value >= bound - 1e-9, "{} < {}", report.alg_value, bound);
    }

    #[test]
    fn optimal_online_dominates_thresholds(seed in any::<u64>()) {
        let (inst, sched) = case(seed, 7);
        let best = optimal_online_max(&inst).unwrap().value;
        let t1 = theorem1_schedule(inst.len(), inst.opt()).unwrap();
        for s in [&sched, &t1] {
            let alg = evaluate_exact(&inst, s).unwrap().alg_value;
            prop_assert!(best >= alg - 1e-9);
        }
        prop_assert!(best <= inst.opt() + 1e-9);
    }

    #[test]
    fn dp_matches_enumeration(seed in any::<u64>()) {
        let (inst, sched) = case(seed, 4);
        let a = evaluate_exact(&inst, &sched).unwrap();
        let b = evaluate_bruteforce(&inst, &sched).unwrap();
        prop_assert!((a.alg_value - b.alg_value).abs() <= 1e-9);
        for (x, y) in a.pass.theta.iter().zip(&b.pass.theta) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn min_threshold_policy_never_beats_optimum(seed in any::<u64>()) {
        let (inst, sched) = case(seed, 6);
        let inst = Instance::minimize("min", inst.distributions().to_vec()).unwrap();
        let best = optimal_online_min(&inst).unwrap().value;
        let alg = threshold_policy_min(&inst, &sched).unwrap();
        prop_assert!(best <= alg + 1e-9);
        prop_assert!(best >= inst.opt() - 1e-9);
    }
}

#[test]
fn zero_thresholds_give_average_mean() {
    for seed in 0..50 {
        let (inst, _) = case(seed, 8);
        let n = inst.len();
        let report = evaluate_exact(&inst, &uniform_schedule(n, 0.0).unwrap()).unwrap();
        let avg = inst.distributions().iter().map(|d| d.mean()).sum::<f64>() / n as f64;
        assert!((report.alg_value - avg).abs() <= 1e-12, "seed {seed}");
    }
}
