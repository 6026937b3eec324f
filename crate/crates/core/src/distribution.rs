//! Finite discrete distributions and exact order-statistic expectations.
//!
//! A [`DiscreteDistribution`] is kept in canonical form: atoms sorted
//! strictly ascending by value, duplicate values merged, probabilities
//! summing to one. All threshold comparisons follow the acceptance rule
//! `value >= threshold`, so [`DiscreteDistribution::tail_prob`] is
//! `P[X >= x]` and [`DiscreteDistribution::prob_below`] is `P[X < x]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for value equality and probability sums.
pub const TOLERANCE: f64 = 1e-12;

/// One support point of a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

impl Atom {
    pub fn new(value: f64, prob: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFiniteValue(value));
        }
        if !(prob > 0.0 && prob <= 1.0 + TOLERANCE) {
            return Err(Error::InvalidProbability(prob));
        }
        Ok(Atom { value, prob })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
    /// `cumulative[j]` is the probability of the first `j + 1` atoms.
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, prob)` pairs, sorting them and
    /// merging values closer than [`TOLERANCE`].
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut atoms = pairs
            .into_iter()
            .map(|(v, p)| Atom::new(v, p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_atoms_checked(&mut atoms, TOLERANCE)?;
        Ok(Self::from_canonical(atoms))
    }

    /// Like [`DiscreteDistribution::new`] but accepts a probability sum within
    /// `sum_tolerance` of one and rescales it to exactly one.
    pub fn normalized<I>(pairs: I, sum_tolerance: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut atoms = pairs
            .into_iter()
            .map(|(v, p)| Atom::new(v, p))
            .collect::<Result<Vec<_>>>()?;
        let sum = Self::from_atoms_checked(&mut atoms, sum_tolerance)?;
        for atom in &mut atoms {
            atom.prob /= sum;
        }
        Ok(Self::from_canonical(atoms))
    }

    /// A single atom with probability one.
    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    fn from_atoms_checked(atoms: &mut Vec<Atom>, sum_tolerance: f64) -> Result<f64> {
        if atoms.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms.drain(..) {
            match merged.last_mut() {
                Some(last) if (atom.value - last.value).abs() <= TOLERANCE => last.prob += atom.prob,
                _ => merged.push(atom),
            }
        }
        *atoms = merged;
        let sum: f64 = atoms.iter().map(|a| a.prob).sum();
        if (sum - 1.0).abs() > sum_tolerance {
            return Err(Error::ProbabilitySum { sum });
        }
        if let Some(bad) = atoms.iter().find(|a| a.prob > 1.0 + TOLERANCE) {
            return Err(Error::InvalidProbability(bad.prob));
        }
        Ok(sum)
    }

    fn from_canonical(atoms: Vec<Atom>) -> Self {
        let cumulative = atoms
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.prob;
                Some(*acc)
            })
            .collect();
        DiscreteDistribution { atoms, cumulative }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn min_value(&self) -> f64 {
        self.atoms[0].value
    }

    pub fn max_value(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].value
    }

    /// `P[X >= x]`.
    pub fn tail_prob(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.value >= x).map(|a| a.prob).sum()
    }

    /// `P[X < x]`, the probability that a threshold of `x` is passed.
    pub fn prob_below(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.value < x).map(|a| a.prob).sum()
    }

    /// `P[X <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.value <= x).map(|a| a.prob).sum()
    }

    /// `P[X > x]`.
    pub fn prob_above(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.value > x).map(|a| a.prob).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.prob).sum()
    }

    /// `E[X · 1{X >= x}]`.
    pub fn partial_mean_at_or_above(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.value >= x)
            .map(|a| a.value * a.prob)
            .sum()
    }

    /// `E[max(X, c)]`.
    pub fn expected_max_with(&self, c: f64) -> f64 {
        self.atoms.iter().map(|a| a.value.max(c) * a.prob).sum()
    }

    /// `E[min(X, c)]`.
    pub fn expected_min_with(&self, c: f64) -> f64 {
        self.atoms.iter().map(|a| a.value.min(c) * a.prob).sum()
    }

    /// Inverse-CDF sample for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.atoms[idx.min(self.atoms.len() - 1)].value
    }
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            atoms: Vec<Atom>,
        }
        let raw = Raw::deserialize(deserializer)?;
        DiscreteDistribution::new(raw.atoms.into_iter().map(|a| (a.value, a.prob))).map_err(serde::de::Error::custom)
    }
}

/// Sorted distinct values appearing in any of the distributions.
pub fn merged_support(ds: &[DiscreteDistribution]) -> Vec<f64> {
    let mut grid: Vec<f64> = ds.iter().flat_map(|d| d.atoms().iter().map(|a| a.value)).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Exact `E[max_i X_i]` for independent `X_i`, through
/// `P[max <= v] - P[max < v]` on the merged support grid.
pub fn expected_max(ds: &[DiscreteDistribution]) -> f64 {
    merged_support(ds)
        .into_iter()
        .map(|v| {
            let at_most: f64 = ds.iter().map(|d| d.cdf(v)).product();
            let below: f64 = ds.iter().map(|d| d.prob_below(v)).product();
            v * (at_most - below)
        })
        .sum()
}

/// Exact `E[min_i X_i]` for independent `X_i`.
pub fn expected_min(ds: &[DiscreteDistribution]) -> f64 {
    merged_support(ds)
        .into_iter()
        .map(|v| {
            let at_least: f64 = ds.iter().map(|d| d.tail_prob(v)).product();
            let above: f64 = ds.iter().map(|d| d.prob_above(v)).product();
            v * (at_least - above)
        })
        .sum()
}

/// `∫_{from}^{∞} P[max_i X_i >= x] dx`, exact for the step function on the
/// merged grid.
pub fn max_tail_integral(ds: &[DiscreteDistribution], from: f64) -> f64 {
    let grid = merged_support(ds);
    let mut total = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for v in grid {
        // On (prev, v] the maximum is >= x exactly when it is >= v.
        let lo = prev.max(from);
        if v > lo {
            let p_max_at_least: f64 = 1.0 - ds.iter().map(|d| d.prob_below(v)).product::<f64>();
            total += p_max_at_least * (v - lo);
        }
        prev = v;
    }
    total
}
