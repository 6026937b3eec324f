//! Optimal adaptive online values by backward induction.
//!
//! Under uniformly random arrival order the state of an online policy is the
//! set of distributions that have not arrived yet. For maximization
//!
//! ```text
//! V(∅) = 0,   V(S) = 1/|S| · Σ_{i∈S} E[max(X_i, V(S∖{i}))]
//! ```
//!
//! and minimization is the mirror image with acceptance forced on the last
//! arrival (`V({i}) = E[X_i]`). Randomized policies cannot beat these values:
//! the optimum of a finite MDP is attained by a deterministic policy.

use serde::Serialize;

use crate::distribution::{merged_support, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};
use crate::schedule::ThresholdSchedule;

pub const MAX_BENCH_N: usize = 20;
pub const MAX_EXCHANGE_N: usize = 12;
/// Budget on `2^n · (support + 1) · 2` exchange states.
pub const EXCHANGE_STATE_BUDGET: f64 = 5e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyValue {
    pub value: f64,
    pub state_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalOrder {
    /// Distributions arrive in the order listed by the instance.
    Fixed,
    /// Uniformly random arrival order.
    Random,
}

fn check_subset_budget(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::BudgetExceeded {
            what: "subset backward induction",
            size: 2f64.powi(n as i32),
            limit: 2f64.powi(limit as i32),
        });
    }
    Ok(())
}

/// Runs `V(S) = 1/|S| Σ_{i∈S} step(i, V(S∖{i}))` over all subsets, with
/// `V(∅) = empty`.
fn subset_induction(n: usize, empty: f64, step: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    let full = 1usize << n;
    let mut v = vec![0.0; full];
    v[0] = empty;
    for mask in 1..full {
        let mut acc = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc += step(i, v[mask ^ (1 << i)]);
        }
        v[mask] = acc / mask.count_ones() as f64;
    }
    v
}

/// Optimal online expected value for maximization under random order.
pub fn optimal_online_max(instance: &Instance) -> Result<PolicyValue> {
    instance.require(Objective::Maximize)?;
    let n = instance.len();
    check_subset_budget(n, MAX_BENCH_N)?;
    let ds = instance.distributions();
    let v = subset_induction(n, 0.0, |i, cont| ds[i].expected_max_with(cont));
    Ok(PolicyValue {
        value: v[v.len() - 1],
        state_count: v.len(),
    })
}

/// Optimal online expected value for maximization when the instance order is
/// the arrival order.
pub fn optimal_online_max_fixed_order(instance: &Instance) -> Result<PolicyValue> {
    instance.require(Objective::Maximize)?;
    let value = instance
        .distributions()
        .iter()
        .rev()
        .fold(0.0, |cont, d| d.expected_max_with(cont));
    Ok(PolicyValue {
        value,
        state_count: instance.len() + 1,
    })
}

/// Optimal online expected value for minimization under random order,
/// accepting the last arrival if nothing was taken before.
pub fn optimal_online_min(instance: &Instance) -> Result<PolicyValue> {
    instance.require(Objective::Minimize)?;
    let n = instance.len();
    check_subset_budget(n, MAX_BENCH_N)?;
    let ds = instance.distributions();
    // With V(∅) = +∞ the singleton case reduces to E[min(X, ∞)] = mean.
    let v = subset_induction(n, f64::INFINITY, |i, cont| {
        if cont.is_infinite() {
            ds[i].mean()
        } else {
            ds[i].expected_min_with(cont)
        }
    });
    Ok(PolicyValue {
        value: v[v.len() - 1],
        state_count: v.len(),
    })
}

pub fn optimal_online_min_fixed_order(instance: &Instance) -> Result<PolicyValue> {
    instance.require(Objective::Minimize)?;
    let ds = instance.distributions();
    let last = ds[ds.len() - 1].mean();
    let value = ds[..ds.len() - 1]
        .iter()
        .rev()
        .fold(last, |cont, d| d.expected_min_with(cont));
    Ok(PolicyValue {
        value,
        state_count: instance.len(),
    })
}

/// Optimal online minimization over `n` i.i.d. copies of `d`; the state
/// collapses to the number of remaining arrivals.
pub fn iid_optimal_online_min(d: &DiscreteDistribution, n: usize) -> Result<PolicyValue> {
    if n == 0 {
        return Err(Error::ZeroLength("n"));
    }
    let value = (1..n).fold(d.mean(), |cont, _| d.expected_min_with(cont));
    Ok(PolicyValue { value, state_count: n })
}

/// Expected payoff of a non-adaptive minimization threshold policy under
/// random order: accept the first `X ≤ τ_k`, and always accept the last arrival.
pub fn threshold_policy_min(instance: &Instance, schedule: &ThresholdSchedule) -> Result<f64> {
    instance.require(Objective::Minimize)?;
    let n = instance.len();
    check_subset_budget(n, MAX_BENCH_N)?;
    if schedule.len() != n {
        return Err(Error::ScheduleLength {
            expected: n,
            got: schedule.len(),
        });
    }
    if schedule.is_adaptive() {
        return Err(Error::AdaptiveSchedule);
    }
    let ds = instance.distributions();
    let full = 1usize << n;
    let mut w = vec![0.0; full];
    for mask in 1..full {
        let remaining = mask.count_ones() as usize;
        let step = n - remaining + 1;
        let tau = schedule.threshold(step).as_f64();
        let mut acc = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let cont = w[mask ^ (1 << i)];
            acc += ds[i]
                .atoms()
                .iter()
                .map(|a| {
                    a.prob
                        * if remaining == 1 || a.value <= tau {
                            a.value
                        } else {
                            cont
                        }
                })
                .sum::<f64>();
        }
        w[mask] = acc / remaining as f64;
    }
    Ok(w[full - 1])
}

/// Exchange-state value table indexed by `(held, used)`, `held == m` meaning
/// nothing is held.
struct ExchangeTable {
    values: Vec<f64>,
}

impl ExchangeTable {
    fn idx(&self, held: usize, used: bool) -> usize {
        held * 2 + used as usize
    }
}

/// Optimal minimization with one exchange: a policy holds at most one value,
/// may replace it once by a later arrival, and pays the value held at the
/// end. Holding nothing at the end is infeasible.
pub fn optimal_online_min_one_exchange(instance: &Instance, order: ArrivalOrder) -> Result<PolicyValue> {
    instance.require(Objective::Minimize)?;
    let n = instance.len();
    let ds = instance.distributions();
    let grid = merged_support(ds);
    let m = grid.len();
    let per_layer = (m + 1) * 2;
    let layers = match order {
        ArrivalOrder::Fixed => n as f64 + 1.0,
        ArrivalOrder::Random => 2f64.powi(n as i32),
    };
    if n > MAX_EXCHANGE_N || layers * per_layer as f64 > EXCHANGE_STATE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "one-exchange backward induction",
            size: layers * per_layer as f64,
            limit: EXCHANGE_STATE_BUDGET,
        });
    }
    let atom_idx: Vec<Vec<(usize, f64)>> = ds
        .iter()
        .map(|d| {
            d.atoms()
                .iter()
                .map(|a| (grid.partition_point(|&g| g < a.value), a.prob))
                .collect()
        })
        .collect();
    let none = m;

    let terminal = {
        let mut values = vec![f64::INFINITY; per_layer];
        for (h, &g) in grid.iter().enumerate() {
            values[h * 2] = g;
            values[h * 2 + 1] = g;
        }
        ExchangeTable { values }
    };

    // Value of facing arrival `i` in state (held, used) with continuation `next`.
    let arrival_value = |i: usize, held: usize, used: bool, next: &ExchangeTable| -> f64 {
        atom_idx[i]
            .iter()
            .map(|&(x, p)| {
                let best = if held == none {
                    next.values[next.idx(x, false)].min(next.values[next.idx(none, false)])
                } else if used {
                    next.values[next.idx(held, true)]
                } else {
                    next.values[next.idx(held, false)].min(next.values[next.idx(x, true)])
                };
                p * best
            })
            .sum()
    };
    let start = match order {
        ArrivalOrder::Fixed => {
            // tables[j] = value with arrivals j.. still to come.
            let mut next = terminal;
            for i in (0..n).rev() {
                let mut values = vec![f64::INFINITY; per_layer];
                for held in 0..=m {
                    for used in [false, true] {
                        if held == none && used {
                            continue;
                        }
                        values[held * 2 + used as usize] = arrival_value(i, held, used, &next);
                    }
                }
                next = ExchangeTable { values };
            }
            next.values[next.idx(none, false)]
        }
        ArrivalOrder::Random => {
            let full = 1usize << n;
            let mut tables: Vec<ExchangeTable> = Vec::with_capacity(full);
            tables.push(terminal);
            for mask in 1..full {
                let count = mask.count_ones() as f64;
                let mut values = vec![f64::INFINITY; per_layer];
                for held in 0..=m {
                    for used in [false, true] {
                        if held == none && used {
                            continue;
                        }
                        let mut acc = 0.0;
                        let mut rest = mask;
                        while rest != 0 {
                            let i = rest.trailing_zeros() as usize;
                            rest &= rest - 1;
                            acc += arrival_value(i, held, used, &tables[mask ^ (1 << i)]);
                        }
                        values[held * 2 + used as usize] = acc / count;
                    }
                }
                tables.push(ExchangeTable { values });
            }
            let last = &tables[full - 1];
            last.values[last.idx(none, false)]
        }
    };
    let state_count = (layers as usize) * per_layer;
    Ok(PolicyValue {
        value: start,
        state_count,
    })
}

impl PolicyValue {
    pub fn ratio_to(&self, opt: f64) -> f64 {
        self.value / opt
    }
}
