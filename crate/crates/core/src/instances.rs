//! Named hard instances, instance files, and seeded random instances for
//! property batteries.
//!
//! Instance files are JSON documents (conventionally `*.instance.json`):
//!
//! ```json
//! {
//!   "name": "hard-075(eps=0.01)",
//!   "objective": "max",
//!   "distributions": [
//!     { "support": [ { "value": 1, "prob": 1 } ] },
//!     { "support": [ { "value": 0, "prob": 0.99 }, { "value": 100, "prob": 0.01 } ] }
//!   ]
//! }
//! ```
//!
//! `value` and `prob` may be JSON numbers or decimal strings. Probabilities
//! of each distribution must sum to one within `1e-9`; they are rescaled to
//! sum to exactly one on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};
use crate::rng::StreamRng;
use crate::schedule::ThresholdSchedule;

/// Probability-sum tolerance for instance files.
pub const FILE_SUM_TOLERANCE: f64 = 1e-9;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        })
    }
}

fn point(v: f64) -> Result<DiscreteDistribution> {
    DiscreteDistribution::point_mass(v)
}

fn rare_jackpot(low: f64, eps: f64) -> Result<DiscreteDistribution> {
    DiscreteDistribution::new([(low, 1.0 - eps), (1.0 / eps, eps)])
}

/// `D1 = {1}`, `D2 = {0 w.p. 1-eps, 1/eps w.p. eps}`; hard for adversarial order.
pub fn gen_prophet_hard(eps: f64) -> Result<Instance> {
    check_eps(eps)?;
    Instance::maximize(
        format!("prophet-hard(eps={eps})"),
        vec![point(1.0)?, rare_jackpot(0.0, eps)?],
    )
}

/// `n` point masses at `1/(1-1/n)` and one distribution `{0 w.p. 1-1/n, n w.p. 1/n}`.
pub fn gen_one_threshold_hard(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            range: "n >= 2",
        });
    }
    let nf = n as f64;
    let mass = 1.0 / (1.0 - 1.0 / nf);
    let mut ds = vec![point(mass)?; n];
    ds.push(DiscreteDistribution::new([(0.0, 1.0 - 1.0 / nf), (nf, 1.0 / nf)])?);
    Instance::maximize(format!("one-threshold-hard(n={n})"), ds)
}

/// Same shape as [`gen_prophet_hard`], meant for random arrival order.
pub fn gen_075_hard(eps: f64) -> Result<Instance> {
    check_eps(eps)?;
    Instance::maximize(
        format!("hard-075(eps={eps})"),
        vec![point(1.0)?, rare_jackpot(0.0, eps)?],
    )
}

/// `n` i.i.d. copies of `{0, 1, 2^n}` with probability 1/3 each, minimized.
pub fn gen_min_iid_hard(n: usize) -> Result<Instance> {
    let d = min_iid_distribution(n)?;
    Instance::minimize(format!("min-iid-hard(n={n})"), vec![d; n])
}

/// The common distribution of [`gen_min_iid_hard`].
pub fn min_iid_distribution(n: usize) -> Result<DiscreteDistribution> {
    if n == 0 || n > 1023 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            range: "1..=1023",
        });
    }
    let third = 1.0 / 3.0;
    DiscreteDistribution::new([(0.0, third), (1.0, third), (2f64.powi(n as i32), third)])
}

/// `D1 = {1}`, `D2 = {eps/(1-eps) w.p. 1-eps, 1/eps w.p. eps}`,
/// `D3 = {0 w.p. 1-eps, 1/eps w.p. eps}`, minimized.
pub fn gen_min_exchange_hard(eps: f64) -> Result<Instance> {
    check_eps(eps)?;
    Instance::minimize(
        format!("min-exchange-hard(eps={eps})"),
        vec![
            point(1.0)?,
            rare_jackpot(eps / (1.0 - eps), eps)?,
            rare_jackpot(0.0, eps)?,
        ],
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub objective: Objective,
    pub distributions: Vec<DistributionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionEntry {
    pub support: Vec<AtomEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomEntry {
    #[serde(deserialize_with = "decimal")]
    pub value: f64,
    #[serde(deserialize_with = "decimal")]
    pub prob: f64,
}

fn decimal<'de, D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }
    match Raw::deserialize(deserializer)? {
        Raw::Number(v) => Ok(v),
        Raw::Text(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| serde::de::Error::custom(format!("{s:?} is not a decimal number"))),
    }
}

impl From<&Instance> for InstanceFile {
    fn from(instance: &Instance) -> Self {
        InstanceFile {
            name: instance.name().to_string(),
            objective: instance.objective(),
            distributions: instance
                .distributions()
                .iter()
                .map(|d| DistributionEntry {
                    support: d
                        .atoms()
                        .iter()
                        .map(|a| AtomEntry {
                            value: a.value,
                            prob: a.prob,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        if self.distributions.is_empty() {
            return Err(Error::Validation("distributions list is empty".into()));
        }
        let ds = self
            .distributions
            .into_iter()
            .enumerate()
            .map(|(i, entry)| {
                if entry.support.is_empty() {
                    return Err(Error::Validation(format!("distributions[{i}].support is empty")));
                }
                DiscreteDistribution::normalized(entry.support.iter().map(|a| (a.value, a.prob)), FILE_SUM_TOLERANCE)
                    .map_err(|e| Error::Validation(format!("distributions[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.name, self.objective, ds)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        Error::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    file.into_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(instance)).expect("instance files always serialize")
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_json(instance) + "\n")?;
    Ok(())
}

/// Random maximization instance with `n` distributions of 1..=`max_support`
/// atoms on the grid `{0, 0.5, …, 10}`, with at least one positive value.
pub fn random_instance(rng: &mut StreamRng, n: usize, max_support: usize) -> Instance {
    assert!(n >= 1 && max_support >= 1);
    loop {
        let ds: Vec<DiscreteDistribution> = (0..n)
            .map(|_| {
                let size = 1 + rng.below(max_support as u64) as usize;
                let raw: Vec<(f64, f64)> = (0..size)
                    .map(|_| (rng.below(21) as f64 * 0.5, 0.05 + rng.uniform()))
                    .collect();
                let total: f64 = raw.iter().map(|r| r.1).sum();
                DiscreteDistribution::new(raw.into_iter().map(|(v, w)| (v, w / total))).expect("normalized weights")
            })
            .collect();
        if ds.iter().any(|d| d.max_value() > 0.0) {
            return Instance::maximize(format!("random(n={n})"), ds).expect("nonempty");
        }
    }
}

/// Random non-increasing thresholds: a mix of support values (to exercise
/// ties) and uniform draws up to slightly above the largest value.
pub fn random_non_increasing_schedule(rng: &mut StreamRng, instance: &Instance) -> ThresholdSchedule {
    let ds = instance.distributions();
    let top = ds.iter().map(|d| d.max_value()).fold(0.0, f64::max) * 1.1;
    let mut values: Vec<f64> = (0..instance.len())
        .map(|_| {
            if rng.below(3) == 0 {
                let d = &ds[rng.below(ds.len() as u64) as usize];
                d.atoms()[rng.below(d.support_len() as u64) as usize].value
            } else {
                rng.uniform() * top
            }
        })
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    ThresholdSchedule::from_values(&values).expect("finite thresholds")
}
