//! Scenarios (agents x item types) and allocations.

use crate::error::{Error, Result};
use crate::utility::UtilityFunction;
use num::rational::BigRational;
use num::Signed;

/// n agents, k item types with `counts[j]` identical copies each, a weight
/// per (agent, type) and a utility function per (agent, type).
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    agent_names: Vec<String>,
    type_names: Vec<String>,
    weights: Vec<Vec<BigRational>>,
    utilities: Vec<Vec<UtilityFunction>>,
    counts: Vec<u64>,
}

impl Scenario {
    pub fn new(
        agent_names: Vec<String>,
        type_names: Vec<String>,
        weights: Vec<Vec<BigRational>>,
        utilities: Vec<Vec<UtilityFunction>>,
        counts: Vec<u64>,
    ) -> Result<Self> {
        let n = agent_names.len();
        let k = type_names.len();
        if n == 0 {
            return Err(Error::InvalidScenario("at least one agent required".into()));
        }
        if k == 0 {
            return Err(Error::InvalidScenario(
                "at least one item type required".into(),
            ));
        }
        if counts.len() != k {
            return Err(Error::InvalidScenario(format!(
                "expected {k} item counts, got {}",
                counts.len()
            )));
        }
        if counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .is_none()
        {
            return Err(Error::InvalidScenario(
                "item counts overflow the supported total".into(),
            ));
        }
        if weights.len() != n || utilities.len() != n {
            return Err(Error::InvalidScenario(
                "weight and utility matrices must have one row per agent".into(),
            ));
        }
        for (i, name) in agent_names.iter().enumerate() {
            if weights[i].len() != k || utilities[i].len() != k {
                return Err(Error::InvalidScenario(format!(
                    "agent {name} must supply {k} weights and {k} utilities"
                )));
            }
            for j in 0..k {
                if !weights[i][j].is_positive() {
                    return Err(Error::InvalidScenario(format!(
                        "weight of agent {name} for type {} must be positive",
                        type_names[j]
                    )));
                }
                utilities[i][j].validate(counts[j], name, &type_names[j])?;
            }
        }
        Ok(Scenario {
            agent_names,
            type_names,
            weights,
            utilities,
            counts,
        })
    }

    /// Single-type scenario with generated names A1..An.
    pub fn single_type(
        weights: Vec<BigRational>,
        utilities: Vec<UtilityFunction>,
        count: u64,
    ) -> Result<Self> {
        let n = weights.len();
        let agent_names = (1..=n).map(|i| format!("A{i}")).collect();
        Scenario::new(
            agent_names,
            vec!["good".to_string()],
            weights.into_iter().map(|w| vec![w]).collect(),
            utilities.into_iter().map(|f| vec![f]).collect(),
            vec![count],
        )
    }

    pub fn n(&self) -> usize {
        self.agent_names.len()
    }

    pub fn k(&self) -> usize {
        self.type_names.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, j: usize) -> u64 {
        self.counts[j]
    }

    pub fn total_items(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn weight(&self, i: usize, j: usize) -> &BigRational {
        &self.weights[i][j]
    }

    pub fn utility(&self, i: usize, j: usize) -> &UtilityFunction {
        &self.utilities[i][j]
    }

    pub fn agent_name(&self, i: usize) -> &str {
        &self.agent_names[i]
    }

    pub fn type_name(&self, j: usize) -> &str {
        &self.type_names[j]
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agent_names
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agent_names.iter().position(|a| a == name)
    }

    /// Weight vector for single-type scenarios.
    pub fn single_weight(&self, i: usize) -> &BigRational {
        &self.weights[i][0]
    }

    pub fn single_utility(&self, i: usize) -> &UtilityFunction {
        &self.utilities[i][0]
    }

    /// Per-agent scalar weights: the single column for k = 1, or the common
    /// row value when every row is constant across types.
    pub fn scalar_weights(&self) -> Option<Vec<BigRational>> {
        let mut out = Vec::with_capacity(self.n());
        for row in &self.weights {
            let first = &row[0];
            if row.iter().any(|w| w != first) {
                return None;
            }
            out.push(first.clone());
        }
        Some(out)
    }

    pub fn has_float_utilities(&self) -> bool {
        self.utilities.iter().flatten().any(|f| f.is_float_backed())
    }

    /// Restriction of a multi-type scenario to one column.
    pub fn restrict_to_type(&self, j: usize) -> Result<Scenario> {
        Scenario::new(
            self.agent_names.clone(),
            vec![self.type_names[j].clone()],
            self.weights
                .iter()
                .map(|row| vec![row[j].clone()])
                .collect(),
            self.utilities
                .iter()
                .map(|row| vec![row[j].clone()])
                .collect(),
            vec![self.counts[j]],
        )
    }
}

/// A (possibly partial) assignment of item counts to agents, one column per
/// type. Complete allocations have column sums equal to the type counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    counts: Vec<Vec<u64>>,
    partial: bool,
}

impl Allocation {
    pub fn complete(scenario: &Scenario, counts: Vec<Vec<u64>>) -> Result<Self> {
        Self::check_shape(scenario, &counts)?;
        for j in 0..scenario.k() {
            let got: u64 = counts.iter().map(|row| row[j]).sum();
            if got != scenario.count(j) {
                return Err(Error::IncompleteAllocation {
                    type_name: scenario.type_name(j).to_string(),
                    got,
                    expected: scenario.count(j),
                });
            }
        }
        Ok(Allocation {
            counts,
            partial: false,
        })
    }

    pub fn partial(scenario: &Scenario, counts: Vec<Vec<u64>>) -> Result<Self> {
        Self::check_shape(scenario, &counts)?;
        for j in 0..scenario.k() {
            let got: u64 = counts.iter().map(|row| row[j]).sum();
            if got > scenario.count(j) {
                return Err(Error::IncompleteAllocation {
                    type_name: scenario.type_name(j).to_string(),
                    got,
                    expected: scenario.count(j),
                });
            }
        }
        Ok(Allocation {
            counts,
            partial: true,
        })
    }

    /// Single-type convenience: one count per agent.
    pub fn from_single(scenario: &Scenario, counts: Vec<u64>) -> Result<Self> {
        Self::complete(scenario, counts.into_iter().map(|c| vec![c]).collect())
    }

    /// Internal constructor for callers that guarantee completeness by
    /// construction (enumerators, greedy loops).
    pub(crate) fn trusted_complete(counts: Vec<Vec<u64>>) -> Self {
        Allocation {
            counts,
            partial: false,
        }
    }

    pub(crate) fn trusted_partial(counts: Vec<Vec<u64>>) -> Self {
        Allocation {
            counts,
            partial: true,
        }
    }

    fn check_shape(scenario: &Scenario, counts: &[Vec<u64>]) -> Result<()> {
        if counts.len() != scenario.n() || counts.iter().any(|row| row.len() != scenario.k()) {
            return Err(Error::InvalidScenario(format!(
                "allocation must be a {}x{} matrix",
                scenario.n(),
                scenario.k()
            )));
        }
        Ok(())
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    /// Column 0 as a vector, for single-type scenarios.
    pub fn single_counts(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row[0]).collect()
    }

    pub fn items_of_agent(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }
}
