//! Exact evaluation of non-adaptive threshold schedules under uniformly
//! random arrival order.
//!
//! The dynamic program runs over subsets `S` of distributions. `h(S)` is the
//! probability that the first `|S|` arrivals are exactly the members of `S`
//! (in some order) and all of them were passed:
//!
//! ```text
//! h(∅) = 1
//! h(S) = Σ_{i∈S} h(S∖{i}) · P[X_i < τ_|S|] / (n − |S| + 1)
//! ```
//!
//! From it, `θ(k) = Σ_{|S|=k} h(S)`, `q₋ᵢ(k) = n/(n−k) · Σ_{|S|=k, i∉S} h(S)`
//! and `E[z_k] = Σ_{|S|=k−1} h(S)/(n−k+1) · Σ_{i∉S} E[X_i·1{X_i ≥ τ_k}]`.
//! [`evaluate_bruteforce`] computes the same report by enumerating every
//! permutation and outcome tuple.

use itertools::Itertools;
use serde::Serialize;

use crate::distribution::{expected_max, merged_support, DiscreteDistribution};
use crate::engine::first_acceptance;
use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};
use crate::schedule::{uniform_schedule, Threshold, ThresholdSchedule};

/// Largest `n` handled by the `2^n` subset tables.
pub const MAX_SUBSET_N: usize = 20;
/// Largest `n! · Π|support_i|` accepted by the enumeration oracle.
pub const BRUTEFORCE_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassProbabilities {
    /// `theta[k-1] = θ(k)`: probability of passing the first `k` arrivals.
    pub theta: Vec<f64>,
    /// `q_minus[i][k-1] = q₋ᵢ(k)` for `k = 1..n-1`.
    pub q_minus: Vec<Vec<f64>>,
}

impl PassProbabilities {
    /// `θ(k)` with the convention `θ(0) = 1`.
    pub fn theta_at(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.theta[k - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    pub alg_value: f64,
    pub opt_value: f64,
    pub ratio: f64,
    pub pass: PassProbabilities,
    /// `per_step_value[k-1] = E[z_k]`.
    pub per_step_value: Vec<f64>,
}

fn check_inputs(instance: &Instance, schedule: &ThresholdSchedule) -> Result<()> {
    instance.require(Objective::Maximize)?;
    if schedule.is_adaptive() {
        return Err(Error::AdaptiveSchedule);
    }
    if schedule.len() != instance.len() {
        return Err(Error::ScheduleLength {
            expected: instance.len(),
            got: schedule.len(),
        });
    }
    Ok(())
}

fn pass_prob(d: &DiscreteDistribution, t: Threshold) -> f64 {
    match t {
        Threshold::Value(t) => d.prob_below(t),
        Threshold::RejectAll => 1.0,
        Threshold::AcceptAll => 0.0,
    }
}

fn accepted_mass(d: &DiscreteDistribution, t: Threshold) -> f64 {
    match t {
        Threshold::Value(t) => d.partial_mean_at_or_above(t),
        Threshold::RejectAll => 0.0,
        Threshold::AcceptAll => d.mean(),
    }
}

fn ratio(alg: f64, opt: f64) -> f64 {
    alg / opt
}

/// Exact report by the subset dynamic program.
pub fn evaluate_exact(instance: &Instance, schedule: &ThresholdSchedule) -> Result<ExactReport> {
    check_inputs(instance, schedule)?;
    let n = instance.len();
    if n > MAX_SUBSET_N {
        return Err(Error::BudgetExceeded {
            what: "subset dynamic program",
            size: 2f64.powi(n as i32),
            limit: 2f64.powi(MAX_SUBSET_N as i32),
        });
    }
    let ds = instance.distributions();
    // pass[k-1][i] = P[X_i < τ_k], gain[k-1][i] = E[X_i · 1{X_i ≥ τ_k}]
    let pass: Vec<Vec<f64>> = schedule
        .thresholds()
        .iter()
        .map(|&t| ds.iter().map(|d| pass_prob(d, t)).collect())
        .collect();
    let gain: Vec<Vec<f64>> = schedule
        .thresholds()
        .iter()
        .map(|&t| ds.iter().map(|d| accepted_mass(d, t)).collect())
        .collect();

    let full = 1usize << n;
    let mut h = vec![0.0f64; full];
    h[0] = 1.0;
    let mut theta = vec![0.0; n];
    let mut q_minus = vec![vec![0.0; n.saturating_sub(1)]; n];
    let mut per_step = vec![0.0; n];

    for mask in 0..full {
        let size = mask.count_ones() as usize;
        if mask != 0 {
            let step = size - 1;
            let mut acc = 0.0;
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                acc += h[mask ^ (1 << i)] * pass[step][i];
            }
            h[mask] = acc / (n - size + 1) as f64;
            theta[step] += h[mask];
        }
        if size < n {
            let outside = (0..n).filter(|i| mask & (1 << i) == 0);
            if size >= 1 {
                let scale = n as f64 / (n - size) as f64;
                for i in outside.clone() {
                    q_minus[i][size - 1] += h[mask] * scale;
                }
            }
            // The next arrival (step size+1) is uniform over the n - size outsiders.
            let stop_gain: f64 = outside.map(|i| gain[size][i]).sum();
            per_step[size] += h[mask] / (n - size) as f64 * stop_gain;
        }
    }

    let alg_value: f64 = per_step.iter().sum();
    let opt_value = expected_max(ds);
    Ok(ExactReport {
        alg_value,
        opt_value,
        ratio: ratio(alg_value, opt_value),
        pass: PassProbabilities { theta, q_minus },
        per_step_value: per_step,
    })
}

/// Exact report by enumerating all `n!` arrival orders and all outcome tuples.
pub fn evaluate_bruteforce(instance: &Instance, schedule: &ThresholdSchedule) -> Result<ExactReport> {
    check_inputs(instance, schedule)?;
    let n = instance.len();
    let ds = instance.distributions();
    let orders: f64 = (1..=n).map(|k| k as f64).product();
    let work = orders * ds.iter().map(|d| d.support_len() as f64).product::<f64>();
    if work > BRUTEFORCE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "brute-force enumeration",
            size: work,
            limit: BRUTEFORCE_BUDGET,
        });
    }
    let permutations: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let order_weight = 1.0 / orders;

    let mut theta = vec![0.0; n];
    let mut joint = vec![vec![0.0; n.saturating_sub(1)]; n];
    let mut per_step = vec![0.0; n];
    let mut opt_value = 0.0;
    let mut arrivals = vec![0.0; n];

    for tuple in ds.iter().map(|d| d.atoms().iter()).multi_cartesian_product() {
        let w: f64 = tuple.iter().map(|a| a.prob).product();
        let values: Vec<f64> = tuple.iter().map(|a| a.value).collect();
        opt_value += w * values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for perm in &permutations {
            for (slot, &i) in arrivals.iter_mut().zip(perm) {
                *slot = values[i];
            }
            let stop = first_acceptance(&arrivals, schedule);
            let passed_through = stop.map_or(n, |k| k - 1);
            let pw = w * order_weight;
            for t in theta.iter_mut().take(passed_through) {
                *t += pw;
            }
            for k in 1..n.min(passed_through + 1) {
                for (i, row) in joint.iter_mut().enumerate() {
                    if !perm[..k].contains(&i) {
                        row[k - 1] += pw;
                    }
                }
            }
            if let Some(k) = stop {
                per_step[k - 1] += pw * arrivals[k - 1];
            }
        }
    }

    // P[i not among the first k arrivals] = (n - k) / n.
    let q_minus = joint
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(k0, p)| p * n as f64 / (n - (k0 + 1)) as f64)
                .collect()
        })
        .collect();
    let alg_value: f64 = per_step.iter().sum();
    Ok(ExactReport {
        alg_value,
        opt_value,
        ratio: ratio(alg_value, opt_value),
        pass: PassProbabilities { theta, q_minus },
        per_step_value: per_step,
    })
}

/// Lower bound `OPT · (α_1 + Σ_k θ(k)(1/n − α_k/n − α_k + α_{k+1}))` with `α_{n+1} = 0`.
pub fn theta_lower_bound(report: &ExactReport, factors: &[f64]) -> f64 {
    let n = factors.len();
    let nf = n as f64;
    let correction: f64 = (0..n)
        .map(|k| {
            let next = factors.get(k + 1).copied().unwrap_or(0.0);
            report.pass.theta[k] * (1.0 / nf - factors[k] / nf - factors[k] + next)
        })
        .sum();
    report.opt_value * (factors[0] + correction)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub threshold: f64,
    pub ratio: f64,
    pub alg_value: f64,
    pub opt_value: f64,
    /// Every evaluated `(threshold, ratio)` pair in ascending threshold order.
    pub evaluated: Vec<(f64, f64)>,
}

/// All support values plus midpoints between adjacent ones. The ratio of a
/// single threshold is piecewise constant between support values, so this
/// set attains the best single-threshold ratio.
pub fn single_threshold_candidates(instance: &Instance) -> Vec<f64> {
    let grid = merged_support(instance.distributions());
    let mut out: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    out.extend(grid);
    out.sort_by(f64::total_cmp);
    out
}

/// Expected value of the single threshold `t` applied at every step, in
/// `O(n³)` time. The first arrival clearing `t` is uniform among those that
/// clear it, so the value is `Σ_i E[X_i·1{X_i ≥ t}] · E[1/(1 + B₋ᵢ)]`, where
/// `B₋ᵢ` counts the other distributions at or above `t`.
pub fn single_threshold_value(instance: &Instance, t: f64) -> Result<f64> {
    check_inputs(instance, &uniform_schedule(instance.len(), t)?)?;
    let ds = instance.distributions();
    let tail: Vec<f64> = ds.iter().map(|d| d.tail_prob(t)).collect();
    let mut total = 0.0;
    for (i, d) in ds.iter().enumerate() {
        let gain = d.partial_mean_at_or_above(t);
        if gain == 0.0 {
            continue;
        }
        // Poisson-binomial law of the number of other passing values.
        let mut law = vec![1.0];
        for (j, &p) in tail.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![0.0; law.len() + 1];
            for (c, &w) in law.iter().enumerate() {
                next[c] += w * (1.0 - p);
                next[c + 1] += w * p;
            }
            law = next;
        }
        let share: f64 = law.iter().enumerate().map(|(c, w)| w / (c + 1) as f64).sum();
        total += gain * share;
    }
    Ok(total)
}

/// Best uniform threshold among `candidates`; ties go to the smaller threshold.
pub fn sweep_single_threshold(instance: &Instance, candidates: &[f64]) -> Result<SweepResult> {
    if candidates.is_empty() {
        return Err(Error::ZeroLength("candidate list"));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut evaluated = Vec::with_capacity(sorted.len());
    let opt = instance.opt();
    let mut best: Option<(f64, f64)> = None;
    for t in sorted {
        let alg = single_threshold_value(instance, t)?;
        let r = ratio(alg, opt);
        evaluated.push((t, r));
        if best.is_none_or(|(_, b)| r > ratio(b, opt) + 1e-12) {
            best = Some((t, alg));
        }
    }
    let (threshold, alg_value) = best.expect("nonempty candidates");
    Ok(SweepResult {
        threshold,
        ratio: ratio(alg_value, opt),
        alg_value,
        opt_value: opt,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{secretary_schedule, theorem1_schedule};

    fn point(v: f64) -> DiscreteDistribution {
        DiscreteDistribution::point_mass(v).unwrap()
    }

    fn prophet_example() -> Instance {
        let d2 = DiscreteDistribution::new([(0.0, 0.5), (2.0, 0.5)]).unwrap();
        Instance::maximize("prophet", vec![point(1.0), d2]).unwrap()
    }

    fn assert_reports_close(a: &ExactReport, b: &ExactReport, tol: f64) {
        assert!((a.alg_value - b.alg_value).abs() <= tol);
        assert!((a.opt_value - b.opt_value).abs() <= tol);
        assert!((a.ratio - b.ratio).abs() <= tol);
        for (x, y) in a.pass.theta.iter().zip(&b.pass.theta) {
            assert!((x - y).abs() <= tol);
        }
        for (ra, rb) in a.pass.q_minus.iter().zip(&b.pass.q_minus) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() <= tol);
            }
        }
        for (x, y) in a.per_step_value.iter().zip(&b.per_step_value) {
            assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn prophet_example_matches_hand_enumeration() {
        // Four equally likely (order, draw) cases give 1, 1, 1, 2.
        let report = evaluate_exact(&prophet_example(), &uniform_schedule(2, 0.75).unwrap()).unwrap();
        assert!((report.alg_value - 1.25).abs() < 1e-12);
        assert!((report.opt_value - 1.5).abs() < 1e-12);
        // Step 1 passes only when D2 arrives first and draws 0.
        assert!((report.pass.theta[0] - 0.25).abs() < 1e-12);
        assert!(report.pass.theta[1].abs() < 1e-12);
        // q₋₁(1): first arrival is D2, passes w.p. 1/2. q₋₂(1): D1 always accepted.
        assert!((report.pass.q_minus[0][0] - 0.5).abs() < 1e-12);
        assert!(report.pass.q_minus[1][0].abs() < 1e-12);
        let brute = evaluate_bruteforce(&prophet_example(), &uniform_schedule(2, 0.75).unwrap()).unwrap();
        assert_reports_close(&report, &brute, 1e-12);
    }

    #[test]
    fn shoot_for_the_random_value() {
        // τ = [2, 1] on D1 = {1}, D2 = {0, 2}: expected 5/4 against OPT 6/4.
        let sched = ThresholdSchedule::from_values(&[2.0, 1.0]).unwrap();
        let report = evaluate_exact(&prophet_example(), &sched).unwrap();
        assert!((report.alg_value - 1.25).abs() < 1e-12);
    }

    #[test]
    fn one_threshold_hard_with_threshold_above_point_masses() {
        let n = 4.0;
        let mass = 1.0 / (1.0 - 1.0 / n);
        let mut ds = vec![point(mass); 4];
        ds.push(DiscreteDistribution::new([(0.0, 1.0 - 1.0 / n), (n, 1.0 / n)]).unwrap());
        let inst = Instance::maximize("thm3", ds).unwrap();
        let sched = uniform_schedule(5, mass * (1.0 + 1e-9)).unwrap();
        let report = evaluate_exact(&inst, &sched).unwrap();
        assert!((report.alg_value - 1.0).abs() < 1e-12);
        assert!((report.opt_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_thresholds_take_the_first_arrival() {
        let ds = vec![
            DiscreteDistribution::new([(0.0, 0.5), (3.0, 0.5)]).unwrap(),
            point(1.0),
            DiscreteDistribution::new([(2.0, 0.25), (6.0, 0.75)]).unwrap(),
        ];
        let avg = ds.iter().map(|d| d.mean()).sum::<f64>() / 3.0;
        let inst = Instance::maximize("z", ds).unwrap();
        let report = evaluate_exact(&inst, &uniform_schedule(3, 0.0).unwrap()).unwrap();
        assert_eq!(report.pass.theta[0], 0.0);
        assert!((report.alg_value - avg).abs() < 1e-12);
        assert!((report.per_step_value[0] - avg).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_trivial_cases() {
        let single = Instance::maximize("one", vec![point(1.0)]).unwrap();
        let r = evaluate_bruteforce(&single, &uniform_schedule(1, 1.0).unwrap()).unwrap();
        assert_eq!((r.alg_value, r.opt_value, r.ratio), (1.0, 1.0, 1.0));

        let two = Instance::maximize("two", vec![point(1.0), point(2.0)]).unwrap();
        let sched = ThresholdSchedule::from_values(&[2.0, 1.0]).unwrap();
        let r = evaluate_bruteforce(&two, &sched).unwrap();
        assert_eq!(r.alg_value, 2.0);
        assert_eq!(r.opt_value, 2.0);
        assert_reports_close(&r, &evaluate_exact(&two, &sched).unwrap(), 1e-12);
    }

    #[test]
    fn point_mass_on_threshold_is_accepted() {
        let inst = Instance::maximize("pm", vec![point(1.0), point(1.0)]).unwrap();
        let r = evaluate_exact(&inst, &uniform_schedule(2, 1.0).unwrap()).unwrap();
        assert_eq!(r.alg_value, 1.0);
        assert_eq!(r.pass.theta, vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let inst = prophet_example();
        assert!(matches!(
            evaluate_exact(&inst, &uniform_schedule(3, 1.0).unwrap()),
            Err(Error::ScheduleLength { .. })
        ));
        let adaptive = secretary_schedule(&[], 2).unwrap();
        assert!(matches!(evaluate_exact(&inst, &adaptive), Err(Error::AdaptiveSchedule)));
        assert!(matches!(
            evaluate_bruteforce(&inst, &adaptive),
            Err(Error::AdaptiveSchedule)
        ));
        let big = Instance::maximize("big", vec![point(1.0); 21]).unwrap();
        let err = evaluate_exact(&big, &uniform_schedule(21, 1.0).unwrap()).unwrap_err();
        assert!(err.is_budget());
        let wide = Instance::maximize("wide", vec![point(1.0); 11]).unwrap();
        assert!(evaluate_bruteforce(&wide, &uniform_schedule(11, 1.0).unwrap())
            .unwrap_err()
            .is_budget());
        let min = Instance::minimize("min", vec![point(1.0)]).unwrap();
        assert!(matches!(
            evaluate_exact(&min, &uniform_schedule(1, 1.0).unwrap()),
            Err(Error::WrongObjective { .. })
        ));
    }

    #[test]
    fn sweep_on_identical_point_masses() {
        let inst = Instance::maximize("flat", vec![point(1.0); 4]).unwrap();
        let best = sweep_single_threshold(&inst, &single_threshold_candidates(&inst)).unwrap();
        assert_eq!(best.threshold, 1.0);
        assert_eq!(best.ratio, 1.0);
        assert!(sweep_single_threshold(&inst, &[]).is_err());
    }

    #[test]
    fn sweep_prefers_smaller_threshold_on_ties() {
        let inst = Instance::maximize("flat", vec![point(1.0); 2]).unwrap();
        let best = sweep_single_threshold(&inst, &[1.0, 0.5, 0.0]).unwrap();
        assert_eq!(best.threshold, 0.0);
        assert_eq!(best.evaluated.len(), 3);
    }

    #[test]
    fn candidates_cover_support_and_midpoints() {
        let inst = prophet_example();
        assert_eq!(single_threshold_candidates(&inst), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn theorem1_on_prophet_example() {
        let inst = prophet_example();
        let sched = theorem1_schedule(2, inst.opt()).unwrap();
        let report = evaluate_exact(&inst, &sched).unwrap();
        assert!(report.ratio >= 5.0 / 9.0 - 1e-9);
        let bound = theta_lower_bound(&report, sched.factors().unwrap());
        assert!((bound - 5.0 / 9.0 * report.opt_value).abs() < 1e-12);
        assert!(report.alg_value >= bound - 1e-9);
    }

    #[test]
    fn single_threshold_value_matches_subset_dp() {
        let mut rng = crate::rng::StreamRng::new(41, 0);
        for _ in 0..100 {
            let n = 1 + rng.below(7) as usize;
            let inst = crate::instances::random_instance(&mut rng, n, 3);
            for t in single_threshold_candidates(&inst) {
                let dp = evaluate_exact(&inst, &uniform_schedule(n, t).unwrap())
                    .unwrap()
                    .alg_value;
                let closed = single_threshold_value(&inst, t).unwrap();
                assert!((dp - closed).abs() <= 1e-12, "n={n} t={t}: {dp} vs {closed}");
            }
        }
    }
}
