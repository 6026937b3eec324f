//! Sampled estimates of `E[ALG]` with normal-approximation 95% intervals.
//!
//! Trial `t` runs on ChaCha stream `t` of the seed, so trial 0 reproduces
//! [`crate::engine::run_once`] and results do not depend on the number of
//! worker threads. Statistics are accumulated per fixed-size chunk and the
//! chunks are merged in trial order.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_secretary_stream, run_unchecked};
use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};
use crate::schedule::ThresholdSchedule;

const CHUNK: u64 = 4096;
const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: u64,
    pub seed: u64,
}

impl MCReport {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width_95
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

fn simulate(trials: u64, seed: u64, episode: impl Fn(u64) -> f64 + Sync) -> Result<MCReport> {
    if trials == 0 {
        return Err(Error::ZeroLength("trials"));
    }
    let chunks: Vec<Moments> = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                m.push(episode(t));
            }
            m
        })
        .collect();
    let total = chunks.into_iter().fold(Moments::default(), Moments::merge);
    let std = if trials > 1 {
        (total.m2.max(0.0) / (total.count - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(MCReport {
        mean: total.mean,
        half_width_95: Z_95 * std / (trials as f64).sqrt(),
        trials,
        seed,
    })
}

pub fn estimate(instance: &Instance, schedule: &ThresholdSchedule, trials: u64, seed: u64) -> Result<MCReport> {
    instance.require(Objective::Maximize)?;
    if schedule.len() != instance.len() {
        return Err(Error::ScheduleLength {
            expected: instance.len(),
            got: schedule.len(),
        });
    }
    simulate(trials, seed, |t| {
        run_unchecked(instance, schedule, seed, t).chosen_value
    })
}

/// Estimate for the observe-then-commit secretary rule.
pub fn estimate_secretary(instance: &Instance, trials: u64, seed: u64) -> Result<MCReport> {
    run_secretary_stream(instance, seed, 0)?;
    simulate(trials, seed, |t| {
        run_secretary_stream(instance, seed, t)
            .expect("validated above")
            .chosen_value
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DiscreteDistribution;
    use crate::engine::run_once;
    use crate::schedule::uniform_schedule;

    #[test]
    fn point_masses_have_zero_width() {
        let d = DiscreteDistribution::point_mass(1.0).unwrap();
        let inst = Instance::maximize("pm", vec![d.clone(), d]).unwrap();
        let r = estimate(&inst, &uniform_schedule(2, 1.0).unwrap(), 10_000, 5).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.half_width_95, 0.0);
    }

    #[test]
    fn single_trial_is_run_once() {
        let d = DiscreteDistribution::new([(0.0, 0.5), (3.0, 0.25), (7.0, 0.25)]).unwrap();
        let inst = Instance::maximize("x", vec![d; 4]).unwrap();
        let sched = uniform_schedule(4, 3.0).unwrap();
        for seed in 0..20 {
            let r = estimate(&inst, &sched, 1, seed).unwrap();
            assert_eq!(r.mean, run_once(&inst, &sched, seed).unwrap().chosen_value);
            assert_eq!(r.half_width_95, 0.0);
        }
        assert!(estimate(&inst, &sched, 0, 1).is_err());
    }

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut seq = Moments::default();
        xs.iter().for_each(|&x| seq.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert!((merged.mean - seq.mean).abs() < 1e-12);
        assert!((merged.m2 - seq.m2).abs() < 1e-8);
    }
}
