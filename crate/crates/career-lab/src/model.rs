//! Model primitives: the Gaussian learning parameters and the effort-cost family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Ability-shock precision: finite positive, or infinite (fully persistent type).
///
/// A tagged value rather than a sentinel float, so the persistent-type branch
/// is always explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HDelta {
    Finite(f64),
    Infinite,
}

impl HDelta {
    pub fn is_infinite(self) -> bool {
        matches!(self, HDelta::Infinite)
    }

    /// Noise-to-shock precision ratio r = h_eps / h_delta (0 when infinite).
    pub fn ratio(self, h_eps: f64) -> f64 {
        match self {
            HDelta::Finite(h) => h_eps / h,
            HDelta::Infinite => 0.0,
        }
    }
}

impl Serialize for HDelta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HDelta::Finite(v) => s.serialize_f64(*v),
            HDelta::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for HDelta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(HDelta::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(HDelta::Infinite),
            Raw::Str(s) => Err(D::Error::custom(format!(
                "h_delta must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

impl std::str::FromStr for HDelta {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("inf") {
            Ok(HDelta::Infinite)
        } else {
            s.parse::<f64>()
                .map(HDelta::Finite)
                .map_err(|e| format!("h_delta: {e}"))
        }
    }
}

impl std::fmt::Display for HDelta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HDelta::Finite(v) => write!(f, "{v}"),
            HDelta::Infinite => write!(f, "inf"),
        }
    }
}

/// Primitives of the learning environment.
///
/// `m1`/`h1` parameterize the prior belief over ability, `h_eps` is the
/// output-noise precision, `h_delta` the ability-shock precision, and `beta`
/// the manager's discount factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m1: f64,
    pub h1: f64,
    pub h_eps: f64,
    pub h_delta: HDelta,
    pub beta: f64,
}

impl ModelParams {
    /// r = h_eps / h_delta; zero for the persistent type.
    pub fn r(&self) -> f64 {
        self.h_delta.ratio(self.h_eps)
    }

    /// True when the marginal-benefit series has no finite sum
    /// (undiscounted manager facing a fully persistent type).
    pub fn divergent_regime(&self) -> bool {
        self.beta == 1.0 && self.h_delta.is_infinite()
    }
}

/// Effort-cost family g. Both variants are increasing, convex, continuously
/// differentiable with g'(0) = 0 and g' unbounded.
///
/// `Power` additionally satisfies g'(a) = 0 only at a = 0; `FlatThenPower`
/// deliberately violates that on [0, k], which changes the persistence limit
/// of equilibrium effort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CostSpec {
    /// g(a) = c * a^p / p
    Power { c: f64, p: f64 },
    /// g(a) = 0 on [0, k], then c * (a - k)^p / p
    FlatThenPower { k: f64, c: f64, p: f64 },
}

impl CostSpec {
    pub fn quadratic() -> Self {
        CostSpec::Power { c: 1.0, p: 2.0 }
    }

    /// Width of the zero-marginal-cost region (0 for `Power`).
    pub fn flat_width(&self) -> f64 {
        match self {
            CostSpec::Power { .. } => 0.0,
            CostSpec::FlatThenPower { k, .. } => *k,
        }
    }

    /// g(a).
    pub fn cost(&self, a: f64) -> Result<f64> {
        if a < 0.0 || a.is_nan() {
            return Err(Error::NegativeEffort(a));
        }
        Ok(match *self {
            CostSpec::Power { c, p } => c * a.powf(p) / p,
            CostSpec::FlatThenPower { k, c, p } => {
                if a <= k {
                    0.0
                } else {
                    c * (a - k).powf(p) / p
                }
            }
        })
    }

    /// g'(a); nondecreasing with g'(0) = 0.
    pub fn marginal_cost(&self, a: f64) -> Result<f64> {
        if a < 0.0 || a.is_nan() {
            return Err(Error::NegativeEffort(a));
        }
        Ok(match *self {
            CostSpec::Power { c, p } => c * a.powf(p - 1.0),
            CostSpec::FlatThenPower { k, c, p } => {
                if a <= k {
                    0.0
                } else {
                    c * (a - k).powf(p - 1.0)
                }
            }
        })
    }

    /// Smallest a with g'(a) = y, except that y = 0 under `FlatThenPower`
    /// returns k (the supremum of the zero set). The right-continuous
    /// convention makes the persistence limit of effort attained rather than
    /// only approached, and any selection from [0, k] gives the same utility.
    pub fn marginal_cost_inverse(&self, y: f64) -> Result<f64> {
        if y < 0.0 || y.is_nan() {
            return Err(Error::NegativeTarget(y));
        }
        Ok(match *self {
            CostSpec::Power { c, p } => (y / c).powf(1.0 / (p - 1.0)),
            CostSpec::FlatThenPower { k, c, p } => k + (y / c).powf(1.0 / (p - 1.0)),
        })
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let check = |out: &mut Vec<Violation>, name: &str, v: f64, ok: bool| {
            if !ok {
                out.push(Violation::CostParamInvalid {
                    detail: format!("{name} = {v}"),
                });
            }
        };
        match *self {
            CostSpec::Power { c, p } => {
                check(&mut out, "c must be > 0", c, c.is_finite() && c > 0.0);
                check(&mut out, "p must be > 1", p, p.is_finite() && p > 1.0);
            }
            CostSpec::FlatThenPower { k, c, p } => {
                check(&mut out, "k must be > 0", k, k.is_finite() && k > 0.0);
                check(&mut out, "c must be > 0", c, c.is_finite() && c > 0.0);
                check(&mut out, "p must be > 1", p, p.is_finite() && p > 1.0);
            }
        }
        out
    }
}

/// Parameter bundle that passed validation.
///
/// `divergent_regime` marks beta = 1 with h_delta = inf: constructible so the
/// divergence itself can be studied, but barred from series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedModel {
    pub params: ModelParams,
    pub cost: CostSpec,
    pub divergent_regime: bool,
}

/// Checks every constraint and reports all violations at once.
pub fn validate_params(params: &ModelParams, cost: &CostSpec) -> Result<ValidatedModel> {
    let mut violations = Vec::new();

    if !params.m1.is_finite() {
        violations.push(Violation::NonFiniteField {
            name: "m1",
            value: params.m1,
        });
    }
    for (name, v) in [("h1", params.h1), ("h_eps", params.h_eps)] {
        if !(v.is_finite() && v > 0.0) {
            violations.push(Violation::NonPositivePrecision { name, value: v });
        }
    }
    if let HDelta::Finite(v) = params.h_delta {
        if !(v.is_finite() && v > 0.0) {
            violations.push(Violation::NonPositivePrecision {
                name: "h_delta",
                value: v,
            });
        }
    }
    if !(params.beta.is_finite() && (0.0..=1.0).contains(&params.beta)) {
        violations.push(Violation::BetaOutOfRange { value: params.beta });
    }
    violations.extend(cost.violations());

    if violations.is_empty() {
        Ok(ValidatedModel {
            params: *params,
            cost: *cost,
            divergent_regime: params.divergent_regime(),
        })
    } else {
        Err(Error::InvalidParams { violations })
    }
}
