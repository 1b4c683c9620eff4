use alloc::string::String;

/// Errors produced by the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid leg geometry: {0}")]
    Geometry(&'static str),
    #[error("profile parameter {name} = {value} outside [{lower}, {upper}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("rotation matrix is not orthonormal (error {0:.3e})")]
    NotOrthonormal(f64),
    #[error("search space has no dimensions")]
    EmptySpace,
    #[error("invalid bounds for {name}: [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("trial has {got} parameters, search space has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trial parameter {index} = {value} is outside the search space")]
    OutOfBounds { index: usize, value: f64 },
    #[error("history is empty")]
    EmptyHistory,
    #[error("invalid optimizer config: {0}")]
    TpeConfig(&'static str),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("simulation diverged at t = {time:.3} s")]
    Diverged { time: f64 },
    #[error("invalid model: {0}")]
    Model(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
