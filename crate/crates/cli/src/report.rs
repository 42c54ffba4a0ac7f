//! JSON verdict reports. Rationals are carried as `"a/b"` strings.

use pacdecide::algebra::{format_rational, Rational};
use pacdecide::realdecide::DecideStats;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Learner,
    NotLearner,
    Complexity,
    Bound,
    NoViolationFound,
    UnknownResource,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::UnknownResource => 3,
            Status::InvalidInput => 2,
            _ => 0,
        }
    }
}

/// Inputs as given, in canonical form.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hsize: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleInfo {
    pub h_prime: String,
    /// Output hypotheses with excess risk above eps.
    pub b: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Resources {
    pub cells: u64,
    pub max_coeff_bits: u64,
    pub max_degree: u32,
    pub systems: u64,
}

impl Resources {
    pub fn new(stats: &DecideStats, systems: u64) -> Self {
        Resources {
            cells: stats.cells,
            max_coeff_bits: stats.max_coeff_bits,
            max_degree: stats.max_degree,
            systems,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resource: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<u64>,
    /// For scans: largest sample size fully decided before the failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completed_through: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub status: Status,
    /// Sample complexity or Hoeffding bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hoeffding: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_monotone: Option<Vec<usize>>,
    /// Learner achieving a complexity value: `"erm"` or table lines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learner: Option<serde_json::Value>,
    /// Point -> probability, in the problem's point order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Map<String, serde_json::Value>>,
    /// Exact violation probability at the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_prob: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resources: Option<Resources>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: &str, inputs: Inputs, status: Status) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            status,
            value: None,
            hoeffding: None,
            non_monotone: None,
            learner: None,
            witness: None,
            violation_prob: None,
            counterexample: None,
            resources: None,
            error: None,
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn witness_map(points: &[String], p: &[Rational]) -> serde_json::Map<String, serde_json::Value> {
    points
        .iter()
        .cloned()
        .zip(p.iter().map(|q| format_rational(q).into()))
        .collect()
}
