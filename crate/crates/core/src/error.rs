use thiserror::Error;

use crate::quadrature::QuadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("{what} = {value} is outside its domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypergeometric series did not converge (z = {z}, {terms} terms)")]
    SeriesDivergence { z: f64, terms: usize },
    #[error("guessing-surface strategy needs a guess for the second-period price")]
    MissingGuess,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
