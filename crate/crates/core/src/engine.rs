//! One episode of sequential threshold stopping.
//!
//! An episode draws `X_i ~ D_i` for `i = 0..n` in index order (one
//! `uniform()` each, inverse CDF), then shuffles the identity permutation
//! with the same stream. Step `k` reveals `X_{π_k}`; the first accepted
//! value is kept. When nothing is accepted the payoff is 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};
use crate::rng::StreamRng;
use crate::schedule::{secretary_prefix_len, secretary_schedule, ThresholdSchedule};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    /// `permutation[k]` is the distribution index revealed at step `k + 1`.
    pub permutation: Vec<usize>,
    /// 1-based step at which a value was accepted.
    pub stop_step: Option<usize>,
    pub chosen_value: f64,
    /// Drawn values indexed by distribution, not by arrival.
    pub drawn_values: Vec<f64>,
}

impl RunOutcome {
    /// Values in arrival order.
    pub fn arrival_values(&self) -> Vec<f64> {
        self.permutation.iter().map(|&i| self.drawn_values[i]).collect()
    }

    /// The stop step is the first step whose arrival clears its threshold.
    pub fn is_first_crossing(&self, schedule: &ThresholdSchedule) -> bool {
        self.stop_step == first_acceptance(&self.arrival_values(), schedule)
    }
}

/// 1-based index of the first accepted arrival.
pub fn first_acceptance(arrivals: &[f64], schedule: &ThresholdSchedule) -> Option<usize> {
    arrivals
        .iter()
        .enumerate()
        .find(|&(k, &x)| schedule.accepts(k + 1, x))
        .map(|(k, _)| k + 1)
}

/// Secretary rule on a fixed arrival sequence: observe `floor(n/e)` values,
/// then accept the first one strictly above the observed maximum.
pub fn secretary_acceptance(arrivals: &[f64]) -> Result<Option<usize>> {
    let n = arrivals.len();
    if n < 2 {
        return Err(Error::TooFewArrivals(n));
    }
    let prefix = secretary_prefix_len(n);
    let schedule = secretary_schedule(&arrivals[..prefix], n)?;
    Ok(first_acceptance(arrivals, &schedule))
}

fn draw(instance: &Instance, rng: &mut StreamRng) -> (Vec<f64>, Vec<usize>) {
    let drawn: Vec<f64> = instance
        .distributions()
        .iter()
        .map(|d| d.quantile(rng.uniform()))
        .collect();
    let mut permutation: Vec<usize> = (0..instance.len()).collect();
    rng.shuffle(&mut permutation);
    (drawn, permutation)
}

fn outcome(drawn_values: Vec<f64>, permutation: Vec<usize>, stop_step: Option<usize>) -> RunOutcome {
    let chosen_value = stop_step.map_or(0.0, |k| drawn_values[permutation[k - 1]]);
    RunOutcome {
        permutation,
        stop_step,
        chosen_value,
        drawn_values,
    }
}

fn check_schedule(instance: &Instance, schedule: &ThresholdSchedule) -> Result<()> {
    instance.require(Objective::Maximize)?;
    if schedule.len() != instance.len() {
        return Err(Error::ScheduleLength {
            expected: instance.len(),
            got: schedule.len(),
        });
    }
    Ok(())
}

/// Runs one episode on stream 0 of `seed`.
pub fn run_once(instance: &Instance, schedule: &ThresholdSchedule, seed: u64) -> Result<RunOutcome> {
    run_once_stream(instance, schedule, seed, 0)
}

pub fn run_once_stream(
    instance: &Instance,
    schedule: &ThresholdSchedule,
    seed: u64,
    stream: u64,
) -> Result<RunOutcome> {
    check_schedule(instance, schedule)?;
    Ok(run_unchecked(instance, schedule, seed, stream))
}

pub(crate) fn run_unchecked(instance: &Instance, schedule: &ThresholdSchedule, seed: u64, stream: u64) -> RunOutcome {
    let mut rng = StreamRng::new(seed, stream);
    let (drawn, permutation) = draw(instance, &mut rng);
    let arrivals: Vec<f64> = permutation.iter().map(|&i| drawn[i]).collect();
    let stop = first_acceptance(&arrivals, schedule);
    outcome(drawn, permutation, stop)
}

pub fn run_secretary(instance: &Instance, seed: u64) -> Result<RunOutcome> {
    run_secretary_stream(instance, seed, 0)
}

pub fn run_secretary_stream(instance: &Instance, seed: u64, stream: u64) -> Result<RunOutcome> {
    instance.require(Objective::Maximize)?;
    if instance.len() < 2 {
        return Err(Error::TooFewArrivals(instance.len()));
    }
    let mut rng = StreamRng::new(seed, stream);
    let (drawn, permutation) = draw(instance, &mut rng);
    let arrivals: Vec<f64> = permutation.iter().map(|&i| drawn[i]).collect();
    let stop = secretary_acceptance(&arrivals)?;
    Ok(outcome(drawn, permutation, stop))
}
