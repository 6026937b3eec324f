use serde::{Deserialize, Serialize};

use crate::distribution::{self, DiscreteDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "max")]
    Maximize,
    #[serde(rename = "min")]
    Minimize,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Maximize => "max",
            Objective::Minimize => "min",
        }
    }
}

/// A set of independent distributions, one per arrival, plus the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    objective: Objective,
    distributions: Vec<DiscreteDistribution>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        objective: Objective,
        distributions: Vec<DiscreteDistribution>,
    ) -> Result<Self> {
        if distributions.is_empty() {
            return Err(Error::EmptyInstance);
        }
        Ok(Instance {
            name: name.into(),
            objective,
            distributions,
        })
    }

    pub fn maximize(name: impl Into<String>, distributions: Vec<DiscreteDistribution>) -> Result<Self> {
        Self::new(name, Objective::Maximize, distributions)
    }

    pub fn minimize(name: impl Into<String>, distributions: Vec<DiscreteDistribution>) -> Result<Self> {
        Self::new(name, Objective::Minimize, distributions)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn distributions(&self) -> &[DiscreteDistribution] {
        &self.distributions
    }

    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }

    /// The prophet's benchmark: `E[max]` or `E[min]` depending on the objective.
    pub fn opt(&self) -> f64 {
        match self.objective {
            Objective::Maximize => distribution::expected_max(&self.distributions),
            Objective::Minimize => distribution::expected_min(&self.distributions),
        }
    }

    pub(crate) fn require(&self, objective: Objective) -> Result<()> {
        if self.objective == objective {
            Ok(())
        } else {
            Err(Error::WrongObjective {
                expected: match objective {
                    Objective::Maximize => "maximization",
                    Objective::Minimize => "minimization",
                },
            })
        }
    }
}
