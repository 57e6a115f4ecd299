//! Per-request run traces: the raw material for every invariant check.

use crate::request::Problem;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Greedy Steiner tree / Steiner forest / Steiner network connection.
    Connect,
    Buy,
    Rent,
    Penalty,
    /// CFL client served through the virtual facility-location solution.
    Virtual,
    /// Request at distance zero: satisfied with no cost and no class.
    #[default]
    Free,
}

/// One served request.
///
/// Fields that do not apply to the algorithm that produced the record are
/// left at their defaults and omitted from the JSON form.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceRecord {
    pub index: usize,
    pub point: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<usize>,
    pub a: f64,
    pub class: Option<i32>,
    pub decision: Decision,
    /// Point the request was connected or assigned to (nearest buy
    /// terminal, nearest open facility, or the connection target).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<usize>,
    /// Request indices in the witness set of `point`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<usize>,
    /// Request indices in the witness set of `partner` (pairs only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub partner_witnesses: Vec<usize>,
    /// Cost share charged by the analysis (`2^(j+1)` or `ρ_i`).
    pub share: f64,
    /// Which endpoint entered the rent set (pairs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rent_endpoint: Option<usize>,
    /// Edges bought by a Berman–Coulston instance, tagged with the level
    /// of the inner loop that added them.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub level_edges: Vec<(i32, usize, usize)>,
    /// Facility the client was finally assigned to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facility: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub virtual_facility: Option<usize>,
    pub virtual_distance: f64,
    /// Facility opened (or the buy edge endpoint) by this request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opened: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub virtual_opened: Vec<usize>,
    pub penalty: f64,
    pub rho: f64,
    /// Steiner network tier `ℓ` with `R ∈ [2^ℓ, 2^(ℓ+1))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tier: Option<u32>,
    /// Cost the algorithm accounted for this request.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub problem: Problem,
    pub root: Option<usize>,
    #[serde(rename = "M")]
    pub m: f64,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn new(problem: Problem, root: Option<usize>, m: f64) -> Self {
        Self { problem, root, m, records: Vec::new() }
    }

    /// One JSON object per line, one line per request.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            out.push_str(&serde_json::to_string(rec).expect("trace record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(
        problem: Problem,
        root: Option<usize>,
        m: f64,
        text: &str,
    ) -> Result<Self, serde_json::Error> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { problem, root, m, records })
    }

    pub fn with_decision(&self, d: Decision) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.decision == d)
    }

    /// Sum of the recorded cost shares.
    pub fn total_share(&self) -> f64 {
        self.records.iter().map(|r| r.share).sum()
    }

    pub fn total_cost(&self) -> f64 {
        self.records.iter().map(|r| r.cost).sum()
    }
}
