//! Threshold schedules.
//!
//! The central construction is the factor recurrence
//! `α_n = 1/(n+1)`, `α_k = (n·α_{k+1} + 1)/(n+1)`, whose first factor is the
//! competitive ratio guaranteed by the schedule `τ_k = α_k · OPT` and tends
//! to `1 - 1/e`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// One per-step cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Value(f64),
    /// Sentinel for `+∞`: nothing is accepted at this step.
    RejectAll,
    /// Sentinel for `-∞`: every arrival is accepted (empty secretary prefix).
    AcceptAll,
}

impl Threshold {
    pub fn as_f64(self) -> f64 {
        match self {
            Threshold::Value(t) => t,
            Threshold::RejectAll => f64::INFINITY,
            Threshold::AcceptAll => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Value(t) => fmt::Display::fmt(t, f),
            Threshold::RejectAll => f.pad("inf"),
            Threshold::AcceptAll => f.pad("-inf"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Value(t) => s.serialize_f64(*t),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// How an arrival is compared against the step threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptRule {
    /// Accept when `value >= τ_k`.
    AtLeast,
    /// Accept when `value > τ_k` (secretary rule; ties rejected).
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSchedule {
    thresholds: Vec<Threshold>,
    rule: AcceptRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt: Option<f64>,
    adaptive: bool,
}

impl ThresholdSchedule {
    /// A non-adaptive schedule from explicit finite thresholds.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ZeroLength("schedule length"));
        }
        if let Some(&bad) = values.iter().find(|t| t.is_nan()) {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(ThresholdSchedule {
            thresholds: values.iter().map(|&t| Threshold::Value(t)).collect(),
            rule: AcceptRule::AtLeast,
            factors: None,
            opt: None,
            adaptive: false,
        })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[Threshold] {
        &self.thresholds
    }

    /// Threshold of 1-based step `k`.
    pub fn threshold(&self, k: usize) -> Threshold {
        self.thresholds[k - 1]
    }

    pub fn rule(&self) -> AcceptRule {
        self.rule
    }

    /// The `α_k` factors, when the schedule was built from them.
    pub fn factors(&self) -> Option<&[f64]> {
        self.factors.as_deref()
    }

    pub fn opt(&self) -> Option<f64> {
        self.opt
    }

    /// Adaptive schedules depend on observed values and are produced mid-run.
    pub fn is_adaptive(&self) -> bool {
        self.adaptive
    }

    pub fn is_non_increasing(&self) -> bool {
        self.thresholds.windows(2).all(|w| w[0].as_f64() >= w[1].as_f64())
    }

    /// Whether `value` is accepted at 1-based step `k`.
    pub fn accepts(&self, k: usize, value: f64) -> bool {
        match (self.threshold(k), self.rule) {
            (Threshold::RejectAll, _) => false,
            (Threshold::AcceptAll, _) => true,
            (Threshold::Value(t), AcceptRule::AtLeast) => value >= t,
            (Threshold::Value(t), AcceptRule::Exceeds) => value > t,
        }
    }
}

/// `α_1 … α_n` by backward iteration of the recurrence.
pub fn alpha_factors(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroLength("n"));
    }
    let nf = n as f64;
    let mut alphas = vec![0.0; n];
    let mut next = 0.0;
    for slot in alphas.iter_mut().rev() {
        next = (nf * next + 1.0) / (nf + 1.0);
        *slot = next;
    }
    Ok(alphas)
}

/// `α_k = Σ_{i=0}^{n-k} n^i / (n+1)^{i+1}`, summed term by term.
pub fn alpha_closed_form(n: usize, k: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroLength("n"));
    }
    if k == 0 || k > n {
        return Err(Error::StepOutOfRange { k, n });
    }
    let ratio = n as f64 / (n as f64 + 1.0);
    let mut term = 1.0 / (n as f64 + 1.0);
    let mut sum = 0.0;
    for _ in 0..=(n - k) {
        sum += term;
        term *= ratio;
    }
    Ok(sum)
}

/// `τ_k = α_k · opt`.
pub fn theorem1_schedule(n: usize, opt: f64) -> Result<ThresholdSchedule> {
    if !opt.is_finite() || opt <= 0.0 {
        return Err(Error::NonPositiveOpt(opt));
    }
    let factors = alpha_factors(n)?;
    factors_schedule(&factors, opt)
}

/// `τ_k = factors[k] · opt` for arbitrary factors.
pub fn factors_schedule(factors: &[f64], opt: f64) -> Result<ThresholdSchedule> {
    if !opt.is_finite() || opt <= 0.0 {
        return Err(Error::NonPositiveOpt(opt));
    }
    let values: Vec<f64> = factors.iter().map(|a| a * opt).collect();
    let mut schedule = ThresholdSchedule::from_values(&values)?;
    schedule.factors = Some(factors.to_vec());
    schedule.opt = Some(opt);
    Ok(schedule)
}

pub fn uniform_schedule(n: usize, threshold: f64) -> Result<ThresholdSchedule> {
    if n == 0 {
        return Err(Error::ZeroLength("n"));
    }
    ThresholdSchedule::from_values(&vec![threshold; n])
}

/// `high` on the first `ceil(n/2)` steps, `low` on the rest.
pub fn two_threshold_schedule(n: usize, high: f64, low: f64) -> Result<ThresholdSchedule> {
    if n == 0 {
        return Err(Error::ZeroLength("n"));
    }
    let first_half = n.div_ceil(2);
    let values: Vec<f64> = (0..n).map(|k| if k < first_half { high } else { low }).collect();
    ThresholdSchedule::from_values(&values)
}

/// Number of observe-only steps of the secretary rule, `floor(n/e)`.
pub fn secretary_prefix_len(n: usize) -> usize {
    (n as f64 / std::f64::consts::E).floor() as usize
}

/// Secretary thresholds after observing `observed_prefix`: reject everything
/// during the prefix, then require strictly exceeding its maximum.
pub fn secretary_schedule(observed_prefix: &[f64], n: usize) -> Result<ThresholdSchedule> {
    if n == 0 {
        return Err(Error::ZeroLength("n"));
    }
    let expected = secretary_prefix_len(n);
    if observed_prefix.len() != expected {
        return Err(Error::PrefixLength {
            expected,
            got: observed_prefix.len(),
        });
    }
    let cutoff = observed_prefix
        .iter()
        .copied()
        .reduce(f64::max)
        .map_or(Threshold::AcceptAll, Threshold::Value);
    let thresholds = (0..n)
        .map(|k| if k < expected { Threshold::RejectAll } else { cutoff })
        .collect();
    Ok(ThresholdSchedule {
        thresholds,
        rule: AcceptRule::Exceeds,
        factors: None,
        opt: None,
        adaptive: true,
    })
}

/// Command-line schedule mini-language:
/// `theorem1`, `uniform:<t>`, `two:<t1>,<t2>`, `list:<t1>,...,<tn>`, `secretary`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Theorem1,
    Uniform(f64),
    Two(f64, f64),
    List(Vec<f64>),
    Secretary,
}

impl ScheduleSpec {
    /// Materializes a non-adaptive schedule for `n` steps; `opt` feeds `theorem1`.
    /// Returns `None` for the adaptive secretary rule.
    pub fn build(&self, n: usize, opt: f64) -> Result<Option<ThresholdSchedule>> {
        let schedule = match self {
            ScheduleSpec::Theorem1 => theorem1_schedule(n, opt)?,
            ScheduleSpec::Uniform(t) => uniform_schedule(n, *t)?,
            ScheduleSpec::Two(hi, lo) => two_threshold_schedule(n, *hi, *lo)?,
            ScheduleSpec::List(ts) => {
                if ts.len() != n {
                    return Err(Error::ScheduleLength {
                        expected: n,
                        got: ts.len(),
                    });
                }
                ThresholdSchedule::from_values(ts)?
            }
            ScheduleSpec::Secretary => return Ok(None),
        };
        Ok(Some(schedule))
    }
}

impl FromStr for ScheduleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::ScheduleSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let numbers = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| bad(&format!("{t:?} is not a finite number")))
                })
                .collect()
        };
        let (head, body) = match s.split_once(':') {
            Some((h, b)) => (h, Some(b)),
            None => (s, None),
        };
        match (head, body) {
            ("theorem1", None) => Ok(ScheduleSpec::Theorem1),
            ("secretary", None) => Ok(ScheduleSpec::Secretary),
            ("uniform", Some(b)) => match numbers(b)?.as_slice() {
                [t] => Ok(ScheduleSpec::Uniform(*t)),
                _ => Err(bad("uniform takes exactly one threshold")),
            },
            ("two", Some(b)) => match numbers(b)?.as_slice() {
                [hi, lo] => Ok(ScheduleSpec::Two(*hi, *lo)),
                _ => Err(bad("two takes exactly two thresholds")),
            },
            ("list", Some(b)) => Ok(ScheduleSpec::List(numbers(b)?)),
            _ => Err(bad(
                "expected theorem1, uniform:<t>, two:<t1>,<t2>, list:<t1>,...,<tn> or secretary",
            )),
        }
    }
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleSpec::Theorem1 => f.write_str("theorem1"),
            ScheduleSpec::Secretary => f.write_str("secretary"),
            ScheduleSpec::Uniform(t) => write!(f, "uniform:{t}"),
            ScheduleSpec::Two(a, b) => write!(f, "two:{a},{b}"),
            ScheduleSpec::List(ts) => {
                let joined: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "list:{}", joined.join(","))
            }
        }
    }
}
