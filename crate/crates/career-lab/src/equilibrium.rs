//! Equilibrium effort: the per-period marginal benefit of effort as an
//! infinite discounted series, its inversion through the marginal cost, and
//! the divergent undiscounted regime.
//!
//! The marginal benefit at period t is
//!
//! ```text
//! gamma_t = sum_{s > t} beta^(s-t) * h_eps / (h_{s-1} + h_eps)
//!                       * prod_{j=t..s-2} h_{j+1} / (h_j + h_eps)
//! ```
//!
//! and identically, in weight form,
//!
//! ```text
//! gamma_t = (1 - mu_t) * sum_{s > t} beta^(s-t) * prod_{i=t+1..s-1} mu_i.
//! ```
//!
//! Both evaluators truncate with a certified analytic tail bound rather than
//! a term-smallness heuristic: consecutive terms shrink by the exact factor
//! beta * mu_s, and every future mu is bounded by max(mu_next, mu*), so the
//! reported bound is a true upper bound on the discarded tail. Two
//! historically published variants of the series (one starting the sum a
//! period early, one running the inner product a factor long) are kept
//! behind an explicit [`FocVariant`] for side-by-side contrast and are never
//! used by the production solvers.

use serde::Serialize;

use crate::belief::{mu_star_of_r, mu_step, precision_path, precision_step, PrecisionPath};
use crate::error::{Error, Result};
use crate::model::{CostSpec, HDelta, ModelParams};

/// Hard cap on series terms; reached only for beta pathologically close to 1
/// with a persistent type.
const TERM_BUDGET: usize = 50_000_000;

/// A truncated series value with its certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub gamma: f64,
    /// Upper bound on the discarded tail; at most the requested tolerance.
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl SeriesSum {
    fn zero() -> Self {
        SeriesSum {
            gamma: 0.0,
            tail_bound: 0.0,
            terms_used: 0,
        }
    }
}

/// Which first-order condition to evaluate.
///
/// `Corrected` is the default everywhere; the published variants are
/// reachable only through [`marginal_benefit_erratum`] and the explicit
/// contrast commands built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FocVariant {
    Corrected,
    /// Sum erroneously starts at s = t (adds the term h_eps / h_t).
    H10AsPublished,
    /// Inner product erroneously runs to s instead of s - 1.
    H21AsPublished,
}

/// Per-period marginal benefits and efforts with truncation certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPath {
    pub precision: PrecisionPath,
    pub gamma_seq: Vec<f64>,
    pub effort_seq: Vec<f64>,
    pub trunc_report: Vec<Truncation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// gamma_t <= beta / (1 - beta) for beta < 1 (every series factor is <= 1).
pub fn gamma_upper_bound(beta: f64) -> f64 {
    beta / (1.0 - beta)
}

fn guard_convergent(beta: f64, h_delta: HDelta) -> Result<()> {
    debug_assert!((0.0..=1.0).contains(&beta));
    if beta == 1.0 && h_delta.is_infinite() {
        return Err(Error::DivergentSeries);
    }
    Ok(())
}

/// Largest possible weight along the remaining path: the weight sequence is
/// monotone toward mu*, so every factor after `mu_next` is bounded by
/// max(mu_next, mu*).
fn future_mu_bound(mu_next: f64, mu_star: f64) -> f64 {
    mu_next.max(mu_star).min(1.0)
}

fn tail_bound(beta: f64, beta_pow: f64, term: f64, q: f64) -> f64 {
    let mut bound = f64::INFINITY;
    if beta < 1.0 {
        bound = beta_pow * beta / (1.0 - beta);
    }
    let rho = beta * q;
    if rho < 1.0 {
        bound = bound.min(term.abs() * rho / (1.0 - rho));
    }
    bound
}

fn mu_star_or_one(params: &ModelParams) -> f64 {
    match params.h_delta {
        HDelta::Infinite => 1.0,
        HDelta::Finite(_) => mu_star_of_r(params.r()),
    }
}

/// Marginal benefit of effort at period t, precision form.
pub fn marginal_benefit(
    t: usize,
    path: &PrecisionPath,
    beta: f64,
    tol: f64,
) -> Result<SeriesSum> {
    assert!(tol > 0.0, "tolerance must be positive");
    let params = path.params();
    guard_convergent(beta, params.h_delta)?;
    let h_t = path.h_at(t)?;
    if beta == 0.0 {
        return Ok(SeriesSum::zero());
    }

    let h_eps = params.h_eps;
    let mu_star = mu_star_or_one(params);
    let mut h_prev = h_t; // h_{s-1} while emitting the term for s
    let mut prod = 1.0; // prod_{j=t..s-2} h_{j+1} / (h_j + h_eps)
    let mut beta_pow = 1.0;
    let mut sum = 0.0;
    for terms in 1..=TERM_BUDGET {
        beta_pow *= beta;
        let term = beta_pow * h_eps / (h_prev + h_eps) * prod;
        sum += term;
        let h_s = precision_step(h_prev, params);
        // next term ratio is exactly beta * mu_s
        let q = future_mu_bound(h_s / (h_s + h_eps), mu_star);
        let bound = tail_bound(beta, beta_pow, term, q);
        if bound <= tol {
            return Ok(SeriesSum {
                gamma: sum,
                tail_bound: bound,
                terms_used: terms,
            });
        }
        prod *= h_s / (h_prev + h_eps);
        h_prev = h_s;
    }
    Err(Error::TruncationBudgetExceeded {
        budget: TERM_BUDGET,
    })
}

/// Marginal benefit at period t, weight form; algebraically identical to
/// [`marginal_benefit`] and implemented as an independent evaluation route.
pub fn marginal_benefit_mu_form(
    t: usize,
    path: &PrecisionPath,
    beta: f64,
    tol: f64,
) -> Result<SeriesSum> {
    assert!(tol > 0.0, "tolerance must be positive");
    let params = path.params();
    guard_convergent(beta, params.h_delta)?;
    let mu_t = path.mu_at(t)?;
    sum_weight_series(mu_t, params.r(), beta, tol, false)
}

/// Weight-form series engine. With `product_through_s` the inner product
/// picks up the extra trailing factor of the published variant.
fn sum_weight_series(
    mu_t: f64,
    r: f64,
    beta: f64,
    tol: f64,
    product_through_s: bool,
) -> Result<SeriesSum> {
    if beta == 0.0 {
        return Ok(SeriesSum::zero());
    }
    let one_minus = 1.0 - mu_t;
    let mu_star = if r == 0.0 { 1.0 } else { mu_star_of_r(r) };
    let mut mu_cur = mu_t;
    let mut prod = 1.0;
    let mut beta_pow = 1.0;
    let mut sum = 0.0;
    for terms in 1..=TERM_BUDGET {
        beta_pow *= beta;
        let mu_next = mu_step(mu_cur, r);
        if product_through_s {
            prod *= mu_next;
        }
        let term = beta_pow * one_minus * prod;
        sum += term;
        let q = future_mu_bound(mu_next, mu_star);
        let bound = tail_bound(beta, beta_pow, term, q);
        if bound <= tol {
            return Ok(SeriesSum {
                gamma: sum,
                tail_bound: bound,
                terms_used: terms,
            });
        }
        if !product_through_s {
            prod *= mu_next;
        }
        mu_cur = mu_next;
    }
    Err(Error::TruncationBudgetExceeded {
        budget: TERM_BUDGET,
    })
}

/// Evaluates a published (erroneous) variant of the marginal benefit, for
/// contrast against the corrected series.
///
/// `H10AsPublished` is only defined on persistent-type paths, where the
/// belief precision accumulates additively; `H21AsPublished` is evaluated
/// for any shock precision.
pub fn marginal_benefit_erratum(
    variant: FocVariant,
    t: usize,
    path: &PrecisionPath,
    beta: f64,
    tol: f64,
) -> Result<SeriesSum> {
    assert!(tol > 0.0, "tolerance must be positive");
    let params = path.params();
    match variant {
        FocVariant::Corrected => marginal_benefit(t, path, beta, tol),
        FocVariant::H10AsPublished => {
            if !params.h_delta.is_infinite() {
                return Err(Error::VariantRequiresPersistentType);
            }
            if beta == 1.0 {
                // harmonic tail, no finite sum
                return Err(Error::DivergentSeries);
            }
            let h_t = path.h_at(t)?;
            sum_h10_series(h_t, params.h_eps, beta, tol)
        }
        FocVariant::H21AsPublished => {
            guard_convergent(beta, params.h_delta)?;
            let mu_t = path.mu_at(t)?;
            sum_weight_series(mu_t, params.r(), beta, tol, true)
        }
    }
}

/// Weight-form marginal benefit as a function of the current weight alone,
/// for the corrected series or the H21 variant. Used by scans that sweep
/// mu directly rather than a precision path.
pub fn weight_form_gamma(
    variant: FocVariant,
    mu1: f64,
    r: f64,
    beta: f64,
    tol: f64,
) -> Result<SeriesSum> {
    assert!((0.0..1.0).contains(&mu1) && mu1 > 0.0);
    if beta == 1.0 && r == 0.0 {
        return Err(Error::DivergentSeries);
    }
    match variant {
        FocVariant::Corrected => sum_weight_series(mu1, r, beta, tol, false),
        FocVariant::H21AsPublished => sum_weight_series(mu1, r, beta, tol, true),
        FocVariant::H10AsPublished => Err(Error::VariantRequiresPersistentType),
    }
}

/// sum_{s >= t} beta^(s-t) h_eps / h_s on a persistent-type path
/// (h_s = h_t + (s - t) h_eps).
fn sum_h10_series(h_t: f64, h_eps: f64, beta: f64, tol: f64) -> Result<SeriesSum> {
    let mut h = h_t;
    let mut beta_pow = 1.0;
    let mut sum = 0.0;
    for terms in 1..=TERM_BUDGET {
        sum += beta_pow * h_eps / h;
        if beta == 0.0 {
            return Ok(SeriesSum {
                gamma: sum,
                tail_bound: 0.0,
                terms_used: terms,
            });
        }
        let h_next = h + h_eps;
        // remaining terms are dominated by a geometric series at h_next
        let bound = beta_pow * beta / (1.0 - beta) * h_eps / h_next;
        if bound <= tol {
            return Ok(SeriesSum {
                gamma: sum,
                tail_bound: bound,
                terms_used: terms,
            });
        }
        beta_pow *= beta;
        h = h_next;
    }
    Err(Error::TruncationBudgetExceeded {
        budget: TERM_BUDGET,
    })
}

/// Stationary marginal benefit beta (1 - mu*) / (1 - beta mu*).
pub fn steady_state_gamma(mu_star: f64, beta: f64) -> f64 {
    assert!((0.0..1.0).contains(&mu_star) && (0.0..=1.0).contains(&beta));
    beta * (1.0 - mu_star) / (1.0 - beta * mu_star)
}

/// Equilibrium effort at period t: the marginal cost inverted at gamma_t.
/// The second-order condition holds because the cost is convex.
pub fn equilibrium_effort(
    t: usize,
    path: &PrecisionPath,
    cost: &CostSpec,
    tol: f64,
) -> Result<f64> {
    let beta = path.params().beta;
    let gamma = marginal_benefit(t, path, beta, tol)?.gamma;
    cost.marginal_cost_inverse(gamma.max(0.0))
}

/// Gamma and effort sequences for t = 1..T with per-period truncation
/// certificates.
pub fn equilibrium_path(
    params: &ModelParams,
    cost: &CostSpec,
    t_len: usize,
    tol: f64,
) -> Result<EquilibriumPath> {
    equilibrium_path_for_variant(FocVariant::Corrected, params, cost, t_len, tol)
}

/// As [`equilibrium_path`] but with the marginal benefit taken from the
/// given variant. Exists for the contrast tooling and negative controls;
/// production callers use [`equilibrium_path`].
pub fn equilibrium_path_for_variant(
    variant: FocVariant,
    params: &ModelParams,
    cost: &CostSpec,
    t_len: usize,
    tol: f64,
) -> Result<EquilibriumPath> {
    let path = precision_path(params, t_len);
    let mut gamma_seq = Vec::with_capacity(t_len);
    let mut effort_seq = Vec::with_capacity(t_len);
    let mut trunc_report = Vec::with_capacity(t_len);
    for t in 1..=t_len {
        let s = marginal_benefit_erratum(variant, t, &path, params.beta, tol)?;
        gamma_seq.push(s.gamma);
        effort_seq.push(cost.marginal_cost_inverse(s.gamma.max(0.0))?);
        trunc_report.push(Truncation {
            terms_used: s.terms_used,
            tail_bound: s.tail_bound,
        });
    }
    Ok(EquilibriumPath {
        precision: path,
        gamma_seq,
        effort_seq,
        trunc_report,
    })
}

/// Stationary effort: marginal cost inverted at the stationary marginal
/// benefit. Defined for beta = 1 as well, where the benefit is exactly 1.
pub fn steady_state_effort(params: &ModelParams, cost: &CostSpec) -> Result<f64> {
    let ss = crate::belief::steady_state(params)?;
    cost.marginal_cost_inverse(steady_state_gamma(ss.mu_star, params.beta))
}

/// Certifies divergence of the undiscounted persistent-type series: returns
/// the smallest summation index T whose partial sum exceeds `m_bound`.
pub fn divergence_witness(params: &ModelParams, m_bound: f64) -> Result<u64> {
    if !params.divergent_regime() {
        return Err(Error::NotDivergentRegime);
    }
    assert!(m_bound > 0.0, "bound must be positive");
    // terms are h_eps / h_s = h_eps / (h1 + (s - 1) h_eps), a harmonic tail
    let mut sum = 0.0;
    let mut s: u64 = 2;
    loop {
        let h_s = params.h1 + (s - 1) as f64 * params.h_eps;
        sum += params.h_eps / h_s;
        if sum > m_bound {
            return Ok(s);
        }
        s += 1;
    }
}
