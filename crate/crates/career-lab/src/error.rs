use thiserror::Error;

/// A single violated parameter constraint, collected by validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("{name} must be a positive precision, got {value}")]
    NonPositivePrecision { name: &'static str, value: f64 },
    #[error("beta must lie in [0, 1], got {value}")]
    BetaOutOfRange { value: f64 },
    #[error("cost parameter invalid: {detail}")]
    CostParamInvalid { detail: String },
    #[error("{name} must be a finite real, got {value}")]
    NonFiniteField { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameter validation failed; lists every violated constraint.
    #[error("invalid parameters: {}", fmt_violations(.violations))]
    InvalidParams { violations: Vec<Violation> },

    #[error("effort must be nonnegative, got {0}")]
    NegativeEffort(f64),

    #[error("marginal-cost target must be nonnegative, got {0}")]
    NegativeTarget(f64),

    #[error("signal must be a finite real, got {0}")]
    NonFiniteSignal(f64),

    /// Stationary analysis needs a finite ability-shock precision.
    #[error("no steady state: belief precision grows without bound when h_delta is infinite")]
    NoSteadyState,

    #[error("precision path too short: need index {needed}, length is {len}")]
    PathTooShort { needed: usize, len: usize },

    /// The marginal-benefit series diverges (beta = 1 with h_delta infinite).
    #[error("marginal-benefit series diverges: beta = 1 with h_delta = inf has no finite sum")]
    DivergentSeries,

    #[error("not in the divergent regime: requires beta = 1 and h_delta = inf")]
    NotDivergentRegime,

    #[error("the H10 variant is only defined for h_delta = inf")]
    VariantRequiresPersistentType,

    #[error("too few replications: got {got}, calibration needs at least {needed}")]
    TooFewReplications { got: u64, needed: u64 },

    #[error("series truncation budget of {budget} terms exceeded before reaching tolerance")]
    TruncationBudgetExceeded { budget: usize },
}

fn fmt_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
