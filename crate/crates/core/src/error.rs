use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("partition at t={t} does not refine partition at t={}: {detail}", t - 1)]
    Refinement { t: usize, detail: String },

    #[error("partition at t={t} is not a partition of the outcomes: {detail}")]
    Partition { t: usize, detail: String },

    #[error("invalid probability measure: {0}")]
    Measure(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("time {t} exceeds horizon {horizon}")]
    Horizon { t: usize, horizon: usize },

    #[error("unknown model parameter {0:?}")]
    ThetaUnknown(String),

    #[error("process for {theta:?} is not adapted: {detail}")]
    NotAdapted { theta: String, detail: String },

    #[error("claim is not measurable: {0}")]
    NotMeasurable(String),

    #[error("strategy is not predictable: {0}")]
    NotPredictable(String),

    #[error("invalid model parameters: {0}")]
    Param(String),

    #[error("parameters outside the domain: {0}")]
    Domain(String),

    #[error("point (alpha={}, beta={}) is outside the feasibility region", format_rational(.alpha), format_rational(.beta))]
    Region { alpha: Rational, beta: Rational },

    #[error("no robust arbitrage fails for this market")]
    NraViolated,

    #[error("superhedging program is unbounded below")]
    UnboundedBelow,

    #[error("the set of robust pricing systems is empty")]
    NoPricingSystem,

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
