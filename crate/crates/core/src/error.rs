use thiserror::Error;

use crate::geometry::Point;
use crate::topology::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("degenerate segment at {0}")]
    DegenerateSegment(Point),
    #[error("zone spine is empty")]
    EmptySpine,
    #[error("zone spine segments are not chained end to start")]
    BrokenSpine,
    #[error("zone radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("zones have different radii ({0} vs {1})")]
    RadiusMismatch(f64, f64),
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid topology: {0}")]
    InvariantViolation(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("infeasible request: {0}")]
    InfeasibleRequest(String),
    #[error("no valid graph after {0} attempts")]
    GenerationFailure(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FailureError {
    #[error("invalid radius distribution: {0}")]
    InvalidDistribution(String),
    #[error("failure radius must be positive, got {0}")]
    InvalidRadius(f64),
}

#[derive(Debug, Error)]
pub enum MrcError {
    #[error("graph is not biconnected (cut node {0})")]
    NotBiconnected(NodeId),
    #[error("no valid backup topology assignment with k = {0}")]
    InfeasibleK(usize),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RouteError {
    #[error("invalid radius range [{0}, {1}]")]
    InvalidRange(f64, f64),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("no path from {0} to {1} in the base graph")]
    NoPrimary(NodeId, NodeId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataplaneError {
    #[error("plan for {0} -> {1} hops from {2} to non-neighbour {3}")]
    InconsistentPlan(NodeId, NodeId, NodeId, NodeId),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SpliceError {
    #[error("source and destination are physically disconnected")]
    Disconnected,
    #[error("no splice path over surviving backup segments")]
    NoSplicePath,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space of {0} joint assignments exceeds the limit")]
    TooLarge(u128),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("ratio undefined: zero denominator")]
pub struct UndefinedRatio;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing config key `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("failure log ended after {0} entries")]
    ShortReplayLog(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Mrc(#[from] MrcError),
    #[error(transparent)]
    Failure(#[from] FailureError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
