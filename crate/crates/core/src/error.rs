use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid piecewise map: {0}")]
    InvalidMap(String),

    #[error("homeomorphism is not invertible: {0}")]
    NonInvertible(String),

    #[error("weight must satisfy 0 < inf w <= sup w < inf, got [{inf}, {sup}]")]
    WeightNotBounded { inf: f64, sup: f64 },

    #[error("Segal norm diverges: sup |tau| over the support is {sup_tau} >= 1")]
    DivergentSegalNorm { sup_tau: f64 },

    #[error("tau is not alpha-invariant: max |tau(alpha(t)) - tau(t)| = {deviation}")]
    SegalIncompatible { deviation: f64 },

    #[error("criterion kind {0} needs a Segal context on the window")]
    MissingSegalContext(&'static str),

    #[error("projective distance needs a nonzero base vector")]
    ZeroVector,

    #[error("degenerate approximant input: {0}")]
    Degenerate(&'static str),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("no cut N satisfies the tail bound inside the grid")]
    NoValidN,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("contract violated: {0}")]
    ContractViolated(String),

    #[error("measure has mass outside the window at x = {0}")]
    SupportOutsideK(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
