//! JSON scenario documents.
//!
//! ```json
//! {
//!   "commodities": 2,
//!   "prices": [0.25, 0.75],
//!   "agents": [
//!     { "exponents": [[1], [-1]], "reference": [2, 1], "budget": 200 }
//!   ]
//! }
//! ```
//!
//! Each agent carries exactly one of `budget` or `endowment`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::demand::{price_vector, Income};
use crate::economy::Agent;
use crate::error::{Error, Result};
use crate::group::{validate_group, Bundle, GroupSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub commodities: usize,
    pub prices: Vec<f64>,
    pub agents: Vec<AgentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub exponents: Vec<Vec<f64>>,
    pub reference: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endowment: Option<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

impl Scenario {
    pub fn from_json(text: &str) -> std::result::Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> std::result::Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn check(&self) -> std::result::Result<(), ScenarioError> {
        let l = self.commodities;
        let invalid = |msg: String| Err(ScenarioError::Invalid(msg));
        if l < 2 {
            return invalid(format!("commodities must be at least 2, got {l}"));
        }
        if self.prices.len() != l {
            return invalid(format!("prices has {} entries, expected {l}", self.prices.len()));
        }
        if self.agents.is_empty() {
            return invalid("no agents".into());
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.reference.len() != l {
                return invalid(format!("agent {i}: reference has {} entries", a.reference.len()));
            }
            match (&a.budget, &a.endowment) {
                (Some(_), None) => {}
                (None, Some(e)) if e.len() == l => {}
                (None, Some(e)) => return invalid(format!("agent {i}: endowment has {} entries", e.len())),
                _ => return invalid(format!("agent {i}: give exactly one of budget or endowment")),
            }
        }
        Ok(())
    }

    pub fn prices(&self) -> Result<Bundle> {
        price_vector(self.prices.clone())
    }

    /// The reproduction of the three-consumer example: one group
    /// `diag(t, 1/t)`, prices `(1/4, 3/4)`, budget 200, three references.
    pub fn three_consumers() -> Self {
        let agent = |r: [f64; 2]| AgentEntry {
            exponents: vec![vec![1.0], vec![-1.0]],
            reference: r.to_vec(),
            budget: Some(200.0),
            endowment: None,
        };
        Scenario {
            commodities: 2,
            prices: vec![0.25, 0.75],
            agents: vec![agent([2.0, 1.0]), agent([1.0, 3.0]), agent([1.0, 0.5])],
        }
    }
}

impl AgentEntry {
    pub fn group(&self, l: usize) -> Result<GroupSpec> {
        validate_group(l, &self.exponents)
    }

    pub fn reference(&self) -> Result<Bundle> {
        Bundle::labelled(self.reference.clone(), "reference")
    }

    pub fn income(&self) -> Income {
        match (&self.budget, &self.endowment) {
            (Some(w), _) => Income::Budget(*w),
            (None, Some(e)) => Income::Endowment(e.clone()),
            (None, None) => unreachable!("checked on load"),
        }
    }

    /// Builds a market participant; requires an endowment.
    pub fn market_agent(&self, l: usize) -> Result<Agent> {
        let e = self
            .endowment
            .clone()
            .ok_or_else(|| Error::InvalidParameter("market agents need an endowment, not a budget".into()))?;
        Agent::new(Arc::new(self.group(l)?), self.reference()?, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example() {
        let s = Scenario::from_json(include_str!("../../../docs/three_consumers.json")).unwrap();
        assert_eq!(s, Scenario::three_consumers());
    }

    #[test]
    fn rejects_budget_and_endowment_together() {
        let text = r#"{"commodities":2,"prices":[1,1],"agents":[
            {"exponents":[[1],[-1]],"reference":[1,1],"budget":1,"endowment":[1,1]}]}"#;
        assert!(matches!(Scenario::from_json(text), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lengths() {
        let text = r#"{"commodities":2,"prices":[1,1],"agents":[],"extra":1}"#;
        assert!(matches!(Scenario::from_json(text), Err(ScenarioError::Json(_))));
        let text = r#"{"commodities":2,"prices":[1,1,1],"agents":[
            {"exponents":[[1],[-1]],"reference":[1,1],"budget":1}]}"#;
        assert!(matches!(Scenario::from_json(text), Err(ScenarioError::Invalid(_))));
    }
}
