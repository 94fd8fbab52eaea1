use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of zeta at s = 1")]
    Pole,
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("error target {target:e} not reached (best bound {best:e} with {terms} terms)")]
    NonConvergence { target: f64, best: f64, terms: u64 },
    #[error("capacity exceeded: {requested} > {cap}")]
    Capacity { requested: u64, cap: u64 },
    #[error("table too small: need {needed}, table limit is {limit}")]
    TableTooSmall { needed: u64, limit: u64 },
    #[error("singular point: {0}")]
    Singular(String),
    #[error("precision failure: {0}")]
    Precision(String),
    #[error("zero list incomplete: {0}")]
    Incomplete(String),
}

pub type Result<T> = std::result::Result<T, Error>;
