//! Machine-readable outcome of a checked claim.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimVerdict {
    Pass,
    Fail,
}

/// What a witness entry is evidence of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessRole {
    /// A forbidden repetition or a broken property; only allowed on failures.
    Violation,
    /// An extremal word or a repetition that attains a bound.
    Extremal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimWitness {
    pub role: WitnessRole,
    pub label: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub statement: String,
    pub verdict: ClaimVerdict,
    pub witnesses: Vec<ClaimWitness>,
    pub parameters: BTreeMap<String, Value>,
    pub stats: BTreeMap<String, Value>,
}

impl ClaimReport {
    pub fn new(claim_id: &str, statement: impl Into<String>) -> Self {
        ClaimReport {
            claim_id: claim_id.to_string(),
            statement: statement.into(),
            verdict: ClaimVerdict::Pass,
            witnesses: Vec::new(),
            parameters: BTreeMap::new(),
            stats: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == ClaimVerdict::Pass
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.stats.insert(key.to_string(), to_value(value));
        self
    }

    pub fn elapsed(&mut self, d: Duration) -> &mut Self {
        self.stat("wall_time_ms", d.as_millis() as u64)
    }

    /// Records a violation and turns the verdict into a failure.
    pub fn violation(&mut self, label: &str, value: impl Serialize) -> &mut Self {
        self.verdict = ClaimVerdict::Fail;
        self.witnesses.push(ClaimWitness {
            role: WitnessRole::Violation,
            label: label.to_string(),
            value: to_value(value),
        });
        self
    }

    pub fn extremal(&mut self, label: &str, value: impl Serialize) -> &mut Self {
        self.witnesses.push(ClaimWitness {
            role: WitnessRole::Extremal,
            label: label.to_string(),
            value: to_value(value),
        });
        self
    }

    /// Marks a failure that has no single witness, such as a wrong count.
    pub fn fail(&mut self, why: &str) -> &mut Self {
        self.verdict = ClaimVerdict::Fail;
        self.stat("failure", why)
    }

    /// Pass verdicts carry no violations.
    pub fn is_well_formed(&self) -> bool {
        !self.passed() || self.witnesses.iter().all(|w| w.role != WitnessRole::Violation)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}
