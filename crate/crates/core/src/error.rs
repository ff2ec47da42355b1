use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: k={left} vs k={right}")]
    Dimension { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unstable parameters: lambda={lambda} must be below mu={mu}")]
    Unstable { lambda: f64, mu: f64 },

    #[error("state space of {states} states exceeds the limit of {limit}")]
    StateSpaceTooLarge { states: u128, limit: u128 },

    #[error("chain is reducible: no outflow from state {state} to lower-indexed states")]
    Reducible { state: usize },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: u64, residual: f64 },

    #[error("integration unstable at t={t}: total mass drifted by {drift:e}")]
    IntegrationUnstable { t: f64, drift: f64 },

    #[error("distribution is not exchangeable: coordinate marginals differ by {deviation:e}")]
    Asymmetric { deviation: f64 },

    #[error("malformed proportion vector: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Rejects `lambda >= mu`; long-run quantities only exist below that load.
pub fn check_stable(lambda: f64, mu: f64) -> Result<()> {
    if lambda < mu {
        Ok(())
    } else {
        Err(Error::Unstable { lambda, mu })
    }
}

pub(crate) fn check_rates(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::config(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::config(format!("mu must be finite and >= 0, got {mu}")));
    }
    Ok(())
}
