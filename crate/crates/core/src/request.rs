//! Problem-tagged request sequences and the instance file format.

use crate::error::{MetricError, RequestError};
use crate::metric::MetricSpace;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Problem {
    SteinerTree,
    SteinerForest,
    SteinerNetwork,
    #[serde(rename = "SROB")]
    Srob,
    #[serde(rename = "MROB")]
    Mrob,
    #[serde(rename = "CFL")]
    Cfl,
    #[serde(rename = "PCST")]
    Pcst,
}

impl Problem {
    pub const ALL: [Problem; 7] = [
        Problem::SteinerTree,
        Problem::SteinerForest,
        Problem::SteinerNetwork,
        Problem::Srob,
        Problem::Mrob,
        Problem::Cfl,
        Problem::Pcst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::SteinerTree => "SteinerTree",
            Problem::SteinerForest => "SteinerForest",
            Problem::SteinerNetwork => "SteinerNetwork",
            Problem::Srob => "SROB",
            Problem::Mrob => "MROB",
            Problem::Cfl => "CFL",
            Problem::Pcst => "PCST",
        }
    }

    pub fn is_rooted(self) -> bool {
        matches!(self, Problem::SteinerTree | Problem::Srob | Problem::Cfl | Problem::Pcst)
    }

    /// Whether bought edges are charged `M` times their length.
    pub fn uses_m(self) -> bool {
        matches!(self, Problem::Srob | Problem::Mrob | Problem::Cfl)
    }

    pub fn is_pairwise(self) -> bool {
        matches!(self, Problem::SteinerForest | Problem::SteinerNetwork | Problem::Mrob)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = RequestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| RequestError::Schema(format!("unknown problem {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Request {
    /// A terminal (Steiner tree, SROB) or a client (CFL).
    Terminal(usize),
    Pair(usize, usize),
    Requirement(usize, usize, u32),
    Penalty(usize, f64),
}

impl Request {
    /// Point indices referenced by this request.
    pub fn points(&self) -> Vec<usize> {
        match *self {
            Request::Terminal(p) | Request::Penalty(p, _) => vec![p],
            Request::Pair(s, t) | Request::Requirement(s, t, _) => vec![s, t],
        }
    }

    pub fn endpoints(&self) -> Option<(usize, usize)> {
        match *self {
            Request::Pair(s, t) | Request::Requirement(s, t, _) => Some((s, t)),
            _ => None,
        }
    }

    fn fits(&self, problem: Problem) -> bool {
        matches!(
            (problem, self),
            (Problem::SteinerTree | Problem::Srob | Problem::Cfl, Request::Terminal(_))
                | (Problem::SteinerForest | Problem::Mrob, Request::Pair(..))
                | (Problem::SteinerNetwork, Request::Requirement(..))
                | (Problem::Pcst, Request::Penalty(..))
        )
    }

    fn to_json(self) -> Value {
        match self {
            Request::Terminal(p) => Value::from(p),
            Request::Pair(s, t) => Value::from(vec![s, t]),
            Request::Requirement(s, t, r) => {
                Value::Array(vec![Value::from(s), Value::from(t), Value::from(r)])
            }
            Request::Penalty(p, pi) => Value::Array(vec![Value::from(p), Value::from(pi)]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Facility {
    pub point: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequestSequence {
    pub problem: Problem,
    pub root: Option<usize>,
    pub m: f64,
    pub facilities: Vec<Facility>,
    pub requests: Vec<Request>,
}

impl RequestSequence {
    pub fn new(problem: Problem, requests: Vec<Request>) -> Self {
        Self { problem, root: None, m: 1.0, facilities: Vec::new(), requests }
    }

    pub fn with_root(mut self, root: usize) -> Self {
        self.root = Some(root);
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn with_facilities(mut self, facilities: Vec<Facility>) -> Self {
        self.facilities = facilities;
        self
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Largest requirement among Steiner network requests (0 if none).
    pub fn r_max(&self) -> u32 {
        self.requests
            .iter()
            .filter_map(|r| match r {
                Request::Requirement(_, _, r) => Some(*r),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn penalty(&self, index: usize) -> f64 {
        match self.requests.get(index) {
            Some(Request::Penalty(_, pi)) => *pi,
            _ => 0.0,
        }
    }

    pub fn facility_cost(&self, point: usize) -> Option<f64> {
        self.facilities.iter().find(|f| f.point == point).map(|f| f.cost)
    }

    /// Distinct points referenced by requests, plus the root if any.
    pub fn terminal_points(&self) -> Vec<usize> {
        let mut set: BTreeSet<usize> = self.requests.iter().flat_map(|r| r.points()).collect();
        if let Some(r) = self.root {
            set.insert(r);
        }
        set.into_iter().collect()
    }

    pub fn validate(&self, n: usize) -> Result<(), RequestError> {
        let check = |index: usize| {
            if index < n {
                Ok(())
            } else {
                Err(RequestError::PointOutOfRange { index, n })
            }
        };
        match (self.problem.is_rooted(), self.root) {
            (true, None) => return Err(RequestError::MissingRoot(self.problem.to_string())),
            (false, Some(_)) => return Err(RequestError::UnexpectedRoot(self.problem.to_string())),
            (_, Some(r)) => check(r)?,
            _ => {}
        }
        if !(self.m.is_finite() && self.m >= 0.0) {
            return Err(RequestError::InvalidM(self.m));
        }
        for (index, req) in self.requests.iter().enumerate() {
            if !req.fits(self.problem) {
                return Err(RequestError::WrongShape { index, problem: self.problem.to_string() });
            }
            for p in req.points() {
                check(p)?;
            }
            match *req {
                Request::Requirement(_, _, r) if r < 1 => {
                    return Err(RequestError::InvalidRequirement(r as f64))
                }
                Request::Penalty(_, pi) if !(pi.is_finite() && pi >= 0.0) => {
                    return Err(RequestError::InvalidPenalty(pi))
                }
                _ => {}
            }
        }
        if self.problem == Problem::Cfl {
            let root = self.root.expect("checked above");
            let mut seen = BTreeSet::new();
            for f in &self.facilities {
                check(f.point)?;
                if !(f.cost.is_finite() && f.cost >= 0.0) {
                    return Err(RequestError::InvalidFacilityCost(f.cost));
                }
                if !seen.insert(f.point) {
                    return Err(RequestError::Schema(format!(
                        "facility point {} listed twice",
                        f.point
                    )));
                }
            }
            if self.facility_cost(root) != Some(0.0) {
                return Err(RequestError::NoFacilities);
            }
        }
        Ok(())
    }
}

/// Errors raised while reading an instance file.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Request(#[from] RequestError),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
    problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    facilities: Option<Vec<Facility>>,
    requests: Vec<Value>,
}

/// A metric together with the request sequence played on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub metric: MetricSpace,
    pub seq: RequestSequence,
}

impl Instance {
    pub fn new(metric: MetricSpace, seq: RequestSequence) -> Result<Self, RequestError> {
        seq.validate(metric.n())?;
        Ok(Self { metric, seq })
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        let metric = match (&raw.points, &raw.matrix) {
            (Some(p), None) => MetricSpace::from_points(p)?,
            (None, Some(m)) => MetricSpace::from_matrix(m)?,
            _ => {
                return Err(RequestError::Schema(
                    "exactly one of \"points\" or \"matrix\" is required".into(),
                )
                .into())
            }
        };
        let problem: Problem = raw.problem.parse()?;
        if problem.uses_m() && raw.m.is_none() {
            return Err(RequestError::Schema(format!("problem {problem} requires \"M\"")).into());
        }
        if problem == Problem::Cfl && raw.facilities.is_none() {
            return Err(RequestError::NoFacilities.into());
        }
        if problem != Problem::Cfl && raw.facilities.is_some() {
            return Err(RequestError::Schema("\"facilities\" is only valid for CFL".into()).into());
        }
        let requests = raw
            .requests
            .iter()
            .enumerate()
            .map(|(i, v)| parse_request(problem, i, v))
            .collect::<Result<Vec<_>, _>>()?;
        let seq = RequestSequence {
            problem,
            root: raw.root,
            m: raw.m.unwrap_or(1.0),
            facilities: raw.facilities.unwrap_or_default(),
            requests,
        };
        Ok(Instance::new(metric, seq)?)
    }

    /// Serializes with the normalized distance matrix.
    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            points: None,
            matrix: Some(self.metric.to_matrix()),
            problem: self.seq.problem.name().to_string(),
            root: self.seq.root,
            m: self.seq.problem.uses_m().then_some(self.seq.m),
            facilities: (self.seq.problem == Problem::Cfl).then(|| self.seq.facilities.clone()),
            requests: self.seq.requests.iter().map(|r| r.to_json()).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }
}

fn parse_request(problem: Problem, index: usize, v: &Value) -> Result<Request, RequestError> {
    let shape = || RequestError::WrongShape { index, problem: problem.to_string() };
    let as_index = |v: &Value| v.as_u64().map(|x| x as usize).ok_or_else(shape);
    match problem {
        Problem::SteinerTree | Problem::Srob | Problem::Cfl => Ok(Request::Terminal(as_index(v)?)),
        Problem::SteinerForest | Problem::Mrob => match v.as_array().map(Vec::as_slice) {
            Some([s, t]) => Ok(Request::Pair(as_index(s)?, as_index(t)?)),
            _ => Err(shape()),
        },
        Problem::SteinerNetwork => match v.as_array().map(Vec::as_slice) {
            Some([s, t, r]) => {
                let r = r.as_f64().ok_or_else(shape)?;
                if !(r >= 1.0 && r.fract() == 0.0 && r <= u32::MAX as f64) {
                    return Err(RequestError::InvalidRequirement(r));
                }
                Ok(Request::Requirement(as_index(s)?, as_index(t)?, r as u32))
            }
            _ => Err(shape()),
        },
        Problem::Pcst => match v.as_array().map(Vec::as_slice) {
            Some([i, pi]) => {
                let pi = pi.as_f64().ok_or_else(shape)?;
                Ok(Request::Penalty(as_index(i)?, pi))
            }
            _ => Err(shape()),
        },
    }
}
