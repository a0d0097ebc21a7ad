use crate::metric::Doubleton;
use crate::rational::Rational;

/// Which end of an admissible range a proposed value fell outside of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Lower,
    Upper,
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Bound::Lower => "lower",
            Bound::Upper => "upper",
        })
    }
}

/// A proposed value for `pair` outside the range `lo .. hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeViolation {
    pub pair: Doubleton,
    pub r: Rational,
    pub bound: Bound,
    pub lo: Rational,
    pub hi: Rational,
}

/// A choice set for `pair` with no point in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MissedInterval {
    pub pair: Doubleton,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("the edge set does not connect all vertices")]
    NotConnected,
    #[error("not a graph metric: {0}")]
    NotGraphMetric(String),
    #[error("not a graph pseudometric: {0}")]
    NotGraphPseudometric(String),
    #[error("metric is not floppy at {pair} (hat - check = {gap})")]
    NotFloppy { pair: Doubleton, gap: Rational },
    #[error("{0} is already an edge")]
    AlreadyEdge(Doubleton),
    #[error(
        "r = {} violates the {} bound for {}: admissible range is {} .. {}",
        .0.r, .0.bound, .0.pair, .0.lo, .0.hi
    )]
    ROutOfRange(Box<RangeViolation>),
    #[error("fixpoint iteration did not settle after {0} rounds")]
    ExtensionDiverged(usize),
    #[error("choice set for {} misses the admissible interval [{}, {})", .0.pair, .0.lo, .0.hi)]
    ChoiceSetMissesInterval(Box<MissedInterval>),
    #[error("choice set for {0} has no unused value inside the admissible interval")]
    ChoiceExhausted(Doubleton),
    #[error("no choice set supplied for missing pair {0}")]
    MissingChoiceSet(Doubleton),
    #[error("invalid choice set: {0}")]
    InvalidChoiceSet(String),
    #[error("the gateway set B is empty")]
    EmptyB,
    #[error("a Cantor tree of depth 0 is a single vertex")]
    DepthZero,
    #[error("no floppy instance found after {0} attempts")]
    GenerationExhausted(usize),
    #[error("invalid patchwork: {0}")]
    InvalidPatchwork(String),
    #[error("internal postcondition failed: {0}")]
    Postcondition(String),
}

impl Error {
    /// Stable machine-readable code used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Malformed(_) => "REJECT_MALFORMED",
            Error::UnknownVertex(_) => "UNKNOWN_VERTEX",
            Error::NotConnected => "NOT_CONNECTED",
            Error::NotGraphMetric(_) => "NOT_GRAPH_METRIC",
            Error::NotGraphPseudometric(_) => "NOT_GRAPH_PSEUDOMETRIC",
            Error::NotFloppy { .. } => "NOT_FLOPPY",
            Error::AlreadyEdge(_) => "ALREADY_EDGE",
            Error::ROutOfRange(_) => "R_OUT_OF_RANGE",
            Error::ExtensionDiverged(_) => "EXTENSION_DIVERGED",
            Error::ChoiceSetMissesInterval(_) => "CHOICE_SET_MISSES_INTERVAL",
            Error::ChoiceExhausted(_) => "CHOICE_EXHAUSTED",
            Error::MissingChoiceSet(_) => "MISSING_CHOICE_SET",
            Error::InvalidChoiceSet(_) => "INVALID_CHOICE_SET",
            Error::EmptyB => "EMPTY_B",
            Error::DepthZero => "DEPTH_ZERO",
            Error::GenerationExhausted(_) => "GENERATION_EXHAUSTED",
            Error::InvalidPatchwork(_) => "INVALID_PATCHWORK",
            Error::Postcondition(_) => "POSTCONDITION_FAILED",
        }
    }

    /// True for errors caused by structurally invalid input rather than a
    /// violated mathematical precondition.
    pub fn is_malformed(&self) -> bool {
        matches!(self, Error::Malformed(_) | Error::InvalidChoiceSet(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
