// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A zero-variance Gaussian is a point mass and has no density.
    #[error("degenerate variance: point mass has no density")]
    DegenerateVariance,

    #[error("covariance is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("measurement does not have minimum error-disturbance in this state")]
    NotOptimal,

    #[error("conditioning on a null event (interval mass {0:e})")]
    NullEvent(f64),

    #[error("sample batches do not match: {0}")]
    BatchMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub(crate) fn finite(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(name))
    }
}
