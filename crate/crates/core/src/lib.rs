//! Threshold stopping rules for the prophet-secretary problem: values drawn
//! from known, independent distributions arrive in uniformly random order and
//! exactly one may be kept.
//!
//! * [`distribution`]: finite distributions, `E[max]`, `E[min]`.
//! * [`schedule`]: threshold schedules, including the `α_k · OPT` family.
//! * [`engine`]: seeded single episodes.
//! * [`exact`]: exact evaluation by subset dynamic programming, with a
//!   brute-force oracle.
//! * [`benchmark`]: optimal adaptive online values (max, min, one exchange).
//! * [`instances`]: named hard instances and the instance file format.
//! * [`montecarlo`]: sampled estimates with confidence intervals.
//! * [`repro`]: self-checking experiments for the headline claims.

pub mod benchmark;
pub mod distribution;
pub mod engine;
pub mod error;
pub mod exact;
pub mod instance;
pub mod instances;
pub mod montecarlo;
pub mod repro;
pub mod rng;
pub mod schedule;

pub use distribution::{expected_max, expected_min, Atom, DiscreteDistribution};
pub use error::{Error, Result};
pub use instance::{Instance, Objective};
pub use schedule::{Threshold, ThresholdSchedule};
