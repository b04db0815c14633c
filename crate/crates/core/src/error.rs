use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("axis `{0}` appears in more than one group")]
    OverlappingAxes(String),

    #[error("conditioning event has zero probability")]
    ZeroMassEvent,

    #[error("outcome spaces differ ({left} vs {right} outcomes)")]
    SpaceMismatch { left: usize, right: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid setting: {0}")]
    InvalidSetting(String),

    #[error("loss value {0} lies outside [0, 1]")]
    LossRange(String),

    #[error("size guard exceeded: {what} needs {needed} states but the cap is {cap}")]
    GuardExceeded { what: String, needed: u128, cap: u128 },

    #[error("exact arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("training set contains duplicate examples")]
    DuplicateSample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
