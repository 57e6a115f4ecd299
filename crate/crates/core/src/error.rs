use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is not square or is empty")]
    Malformed,
    #[error("distance ({u},{v}) is not finite")]
    NonFinite { u: usize, v: usize },
    #[error("negative distance d({u},{v}) = {value}")]
    NegativeDistance { u: usize, v: usize, value: f64 },
    #[error("nonzero diagonal entry at {0}")]
    NonZeroDiagonal(usize),
    #[error("asymmetric input: d({u},{v}) != d({v},{u})")]
    AsymmetricInput { u: usize, v: usize },
    #[error("triangle inequality violated: d({u},{v}) > d({u},{via}) + d({via},{v})")]
    TriangleViolation { u: usize, v: usize, via: usize },
    #[error("points do not share one dimension")]
    RaggedPoints,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RequestError {
    #[error("point index {index} out of range for {n} points")]
    PointOutOfRange { index: usize, n: usize },
    #[error("problem {0} requires a root")]
    MissingRoot(String),
    #[error("problem {0} does not take a root")]
    UnexpectedRoot(String),
    #[error("requirement must be an integer >= 1, got {0}")]
    InvalidRequirement(f64),
    #[error("penalty must be finite and >= 0, got {0}")]
    InvalidPenalty(f64),
    #[error("parameter M must be finite and >= 0, got {0}")]
    InvalidM(f64),
    #[error("request {index} does not match problem {problem}")]
    WrongShape { index: usize, problem: String },
    #[error("facility set is empty or lacks the root with zero opening cost")]
    NoFacilities,
    #[error("invalid facility cost {0}")]
    InvalidFacilityCost(f64),
    #[error("instance: {0}")]
    Schema(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HstError {
    #[error("terminal set is empty")]
    EmptyTerminalSet,
    #[error("level {level} outside [{min}, {max}]")]
    LevelOutOfRange { level: i32, min: i32, max: i32 },
    #[error("tree is already extended")]
    AlreadyExtended,
    #[error("extension depth must be -1 or -2, got {0}")]
    BadExtensionDepth(i32),
    #[error("point {0} is not a leaf of the tree")]
    UnknownLeaf(usize),
    #[error("root {0} is not a leaf of the tree")]
    RootNotLeaf(usize),
    #[error("malformed tree: {0}")]
    Malformed(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("too many terminals: {count} > {cap}")]
    TooManyTerminals { count: usize, cap: usize },
    #[error("too many pair endpoints: {count} > {cap}")]
    TooManyPairs { count: usize, cap: usize },
    #[error("too many points: {count} > {cap}")]
    TooManyPoints { count: usize, cap: usize },
    #[error("too many facilities: {count} > {cap}")]
    TooManyFacilities { count: usize, cap: usize },
    #[error("instance too large for exhaustive search (n = {n}, R_max = {r_max})")]
    TooLarge { n: usize, r_max: u32 },
    #[error("root facility missing")]
    NoRootFacility,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("cover family is invalid at level {level}: {reason}")]
    InvalidCover { level: i32, reason: String },
    #[error(transparent)]
    Tree(#[from] HstError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("diamond depth {0} exceeds the cap of 10")]
    DepthTooLarge(u32),
    #[error("need at least one point")]
    NoPoints,
}
