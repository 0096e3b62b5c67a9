//! Belief dynamics: deterministic precision evolution, the mu-weight
//! recursion, Bayesian mean updates, steady states, and impulse responses.
//!
//! The market's belief about ability is Normal with mean `m` and precision
//! `h`. Observing one de-biased signal raises the precision to `h + h_eps`;
//! the ability shock then degrades it through the harmonic-sum step
//! `h' = (h + h_eps) h_delta / (h + h_eps + h_delta)`. The weight
//! `mu = h / (h + h_eps)` obeys the scalar recursion `mu' = 1 / (2 + r - mu)`
//! with `r = h_eps / h_delta`, and both parameterizations are kept in sync
//! here because downstream series are evaluated in each form as a
//! cross-check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{HDelta, ModelParams};

/// Market belief about ability at the start of a period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefState {
    pub m: f64,
    pub h: f64,
}

/// Deterministic precision path h_1..h_T with the derived mu weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionPath {
    h_seq: Vec<f64>,
    mu_seq: Vec<f64>,
    params: ModelParams,
}

impl PrecisionPath {
    pub fn len(&self) -> usize {
        self.h_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_seq.is_empty()
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// h_t for 1-based t.
    pub fn h_at(&self, t: usize) -> Result<f64> {
        self.h_seq
            .get(t.wrapping_sub(1))
            .copied()
            .ok_or(Error::PathTooShort {
                needed: t,
                len: self.len(),
            })
    }

    /// mu_t for 1-based t.
    pub fn mu_at(&self, t: usize) -> Result<f64> {
        self.mu_seq
            .get(t.wrapping_sub(1))
            .copied()
            .ok_or(Error::PathTooShort {
                needed: t,
                len: self.len(),
            })
    }

    pub fn h_seq(&self) -> &[f64] {
        &self.h_seq
    }

    pub fn mu_seq(&self) -> &[f64] {
        &self.mu_seq
    }
}

/// Stationary belief precision and weight (finite h_delta only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub h_star: f64,
    pub mu_star: f64,
    pub r: f64,
}

/// One-period belief-precision transition.
///
/// Equals `h + h_eps` exactly for the persistent type and is strictly smaller
/// otherwise.
pub fn precision_step(h: f64, params: &ModelParams) -> f64 {
    let he = params.h_eps;
    match params.h_delta {
        HDelta::Infinite => h + he,
        HDelta::Finite(hd) => (h + he) * hd / (h + he + hd),
    }
}

/// Precision after the signal is absorbed but before the ability shock.
pub fn posterior_precision(h: f64, params: &ModelParams) -> f64 {
    h + params.h_eps
}

fn mu_of(h: f64, h_eps: f64) -> f64 {
    h / (h + h_eps)
}

/// The weight recursion mu' = 1 / (2 + r - mu).
///
/// `r = 0` is the persistent type; `r` grows with the ability-shock variance.
pub fn mu_step(mu: f64, r: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&mu) && r >= 0.0);
    1.0 / (2.0 + r - mu)
}

/// Conjugate-normal mean update on a de-biased signal, with the precision
/// advanced through `precision_step`.
pub fn mean_update(state: &BeliefState, z: f64, params: &ModelParams) -> Result<BeliefState> {
    if !z.is_finite() {
        return Err(Error::NonFiniteSignal(z));
    }
    let he = params.h_eps;
    Ok(BeliefState {
        m: (state.h * state.m + he * z) / (state.h + he),
        h: precision_step(state.h, params),
    })
}

/// Builds the deterministic path h_1..h_T and its mu weights.
pub fn precision_path(params: &ModelParams, t_len: usize) -> PrecisionPath {
    assert!(t_len >= 1, "path length must be at least 1");
    let mut h_seq = Vec::with_capacity(t_len);
    let mut h = params.h1;
    for _ in 0..t_len {
        h_seq.push(h);
        h = precision_step(h, params);
    }
    let mu_seq = h_seq.iter().map(|&h| mu_of(h, params.h_eps)).collect();
    PrecisionPath {
        h_seq,
        mu_seq,
        params: *params,
    }
}

/// Solves the precision fixed point in closed form.
///
/// mu* is the root in (0, 1) of mu^2 - (2 + r) mu + 1 = 0, evaluated as
/// 2 / (2 + r + sqrt(r (4 + r))) so small r does not cancel; then
/// h* = h_eps mu* / (1 - mu*).
pub fn steady_state(params: &ModelParams) -> Result<SteadyState> {
    let r = match params.h_delta {
        HDelta::Infinite => return Err(Error::NoSteadyState),
        HDelta::Finite(hd) => params.h_eps / hd,
    };
    let mu_star = mu_star_of_r(r);
    let h_star = params.h_eps * mu_star / (1.0 - mu_star);
    Ok(SteadyState { h_star, mu_star, r })
}

/// Root in (0, 1) of the stationary weight equation, stable for small r.
pub fn mu_star_of_r(r: f64) -> f64 {
    debug_assert!(r > 0.0);
    2.0 / (2.0 + r + (r * (4.0 + r)).sqrt())
}

/// Effect of one extra unit of effort at t on the mean belief k periods
/// later: (1 - mu_t) * mu_{t+1} * ... * mu_{t+k-1}.
pub fn impulse_response(t: usize, k: usize, path: &PrecisionPath) -> Result<f64> {
    assert!(t >= 1 && k >= 1, "t and k are 1-based");
    let mut out = 1.0 - path.mu_at(t)?;
    for i in 1..k {
        out *= path.mu_at(t + i)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CostSpec;
    use crate::model::validate_params;

    fn params(h1: f64, h_eps: f64, h_delta: HDelta) -> ModelParams {
        let p = ModelParams {
            m1: 0.0,
            h1,
            h_eps,
            h_delta,
            beta: 0.9,
        };
        validate_params(&p, &CostSpec::quadratic()).unwrap();
        p
    }

    #[test]
    fn precision_step_examples() {
        let p = params(1.0, 1.0, HDelta::Infinite);
        assert_eq!(precision_step(1.0, &p), 2.0);

        let p = params(1.0, 1.0, HDelta::Finite(1.0));
        assert!((precision_step(1.0, &p) - 2.0 / 3.0).abs() < 1e-12);

        // fixed point: h* solves h^2 + h - 1 = 0
        let h_star = (5f64.sqrt() - 1.0) / 2.0;
        assert!((precision_step(h_star, &p) - h_star).abs() < 1e-12);
    }

    #[test]
    fn posterior_precision_is_a_sum() {
        let p = params(1.0, 1.0, HDelta::Infinite);
        assert_eq!(posterior_precision(1.0, &p), 2.0);
        let p = params(0.5, 2.0, HDelta::Infinite);
        assert_eq!(posterior_precision(0.5, &p), 2.5);
    }

    #[test]
    fn mu_step_examples() {
        assert!((mu_step(0.5, 1.0) - 0.4).abs() < 1e-15);
        let mu_star = mu_star_of_r(1.0);
        assert!((mu_step(mu_star, 1.0) - mu_star).abs() < 1e-15);
        assert!(mu_step(0.5, 1e12) < 1e-11);
    }

    #[test]
    fn mean_update_examples() {
        let p = params(1.0, 1.0, HDelta::Infinite);
        let s = BeliefState { m: 0.0, h: 1.0 };
        let next = mean_update(&s, 2.0, &p).unwrap();
        assert!((next.m - 1.0).abs() < 1e-15);
        assert_eq!(next.h, 2.0);

        let s = BeliefState { m: 5.0, h: 1.0 };
        assert_eq!(mean_update(&s, 5.0, &p).unwrap().m, 5.0);

        // dogmatic prior barely moves
        let s = BeliefState { m: 0.0, h: 1e12 };
        assert!(mean_update(&s, 7.0, &p).unwrap().m.abs() < 1e-11);

        assert!(matches!(
            mean_update(&s, f64::NAN, &p),
            Err(Error::NonFiniteSignal(_))
        ));
    }

    #[test]
    fn precision_path_examples() {
        let p = params(1.0, 1.0, HDelta::Infinite);
        let path = precision_path(&p, 4);
        assert_eq!(path.h_seq(), &[1.0, 2.0, 3.0, 4.0]);

        let p = params(1.0, 1.0, HDelta::Finite(1.0));
        let path = precision_path(&p, 3);
        assert!((path.h_at(2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((path.h_at(3).unwrap() - 0.625).abs() < 1e-12);

        let single = precision_path(&p, 1);
        assert_eq!(single.len(), 1);
        assert_eq!(single.h_at(1).unwrap(), 1.0);
        assert!(matches!(
            single.h_at(2),
            Err(Error::PathTooShort { needed: 2, len: 1 })
        ));
    }

    #[test]
    fn persistent_path_matches_closed_form_to_ulp() {
        let p = params(0.73, 0.31, HDelta::Infinite);
        let path = precision_path(&p, 200);
        for (i, &h) in path.h_seq().iter().enumerate() {
            let closed = p.h1 + i as f64 * p.h_eps;
            let ulps = i as f64 + 1.0;
            assert!(
                (h - closed).abs() <= ulps * closed * f64::EPSILON,
                "drift at t={} ({h} vs {closed})",
                i + 1
            );
        }
    }

    #[test]
    fn steady_state_examples() {
        let p = params(1.0, 1.0, HDelta::Finite(1.0));
        let ss = steady_state(&p).unwrap();
        assert!((ss.mu_star - 0.3819660112501052).abs() < 1e-12);
        assert!((ss.h_star - 0.6180339887498949).abs() < 1e-12);
        assert!((precision_step(ss.h_star, &p) - ss.h_star).abs() <= 1e-10);

        // near-persistent: mu* ~ 1 - sqrt(r)
        let p = params(1.0, 1.0, HDelta::Finite(1e8));
        let ss = steady_state(&p).unwrap();
        assert!(ss.mu_star > 0.999);
        assert!(ss.h_star > 1e3);

        let p = params(1.0, 1.0, HDelta::Infinite);
        assert!(matches!(steady_state(&p), Err(Error::NoSteadyState)));
    }

    #[test]
    fn steady_state_matches_fixed_point_iteration() {
        for r in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let closed = mu_star_of_r(r);
            let mut mu = 0.5;
            for _ in 0..100_000 {
                let next = mu_step(mu, r);
                if (next - mu).abs() < 1e-15 {
                    mu = next;
                    break;
                }
                mu = next;
            }
            assert!((mu - closed).abs() < 1e-12, "r={r}: {mu} vs {closed}");
        }
    }

    #[test]
    fn impulse_response_examples() {
        let p = params(1.0, 1.0, HDelta::Infinite);
        let path = precision_path(&p, 5);
        assert!((impulse_response(1, 1, &path).unwrap() - 0.5).abs() < 1e-15);
        // (1 - mu_1) * mu_2 = 0.5 * (2/3)
        assert!((impulse_response(1, 2, &path).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            impulse_response(4, 5, &path),
            Err(Error::PathTooShort { .. })
        ));
    }

    #[test]
    fn conjugacy_cross_check_on_grid() {
        // mu(precision_step(h)) must equal mu_step(mu(h), r)
        let mut h = 0.01;
        while h <= 100.0 {
            let mut r = 0.01;
            while r <= 100.0 {
                let h_eps = 1.0;
                let p = params(h, h_eps, HDelta::Finite(h_eps / r));
                let lhs = mu_of(precision_step(h, &p), h_eps);
                let rhs = mu_step(mu_of(h, h_eps), r);
                assert!(
                    (lhs - rhs).abs() < 1e-12,
                    "h={h} r={r}: {lhs} vs {rhs}"
                );
                r *= 3.7;
            }
            h *= 3.1;
        }
    }

    #[test]
    fn variance_law() {
        for (h, h_eps, hd) in [(0.5, 1.0, 2.0), (3.0, 0.2, 0.7), (10.0, 5.0, 0.01)] {
            let p = params(h, h_eps, HDelta::Finite(hd));
            let lhs = 1.0 / precision_step(h, &p);
            let rhs = 1.0 / (h + h_eps) + 1.0 / hd;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_sequence_monotone_convergence() {
        for r in [0.1, 1.0, 10.0] {
            let target = mu_star_of_r(r);
            for mu1 in [0.01, 0.3, target, 0.7, 0.99] {
                let mut mu = mu1;
                let mut prev = mu;
                let increasing = mu < target;
                for _ in 0..200 {
                    mu = mu_step(mu, r);
                    if increasing {
                        assert!(mu >= prev - 1e-15);
                    } else {
                        assert!(mu <= prev + 1e-15);
                    }
                    prev = mu;
                }
                assert!(
                    (mu - target).abs() < 1e-12,
                    "r={r} mu1={mu1}: ended at {mu}, target {target}"
                );
            }
        }
    }

    /// Brute-force posterior mean by quadrature over a wide grid; independent
    /// of the conjugate closed form.
    fn posterior_mean_by_quadrature(m: f64, h: f64, z: f64, h_eps: f64) -> f64 {
        let sd_prior = (1.0 / h).sqrt();
        let sd_noise = (1.0 / h_eps).sqrt();
        let center = 0.5 * (m + z);
        let half_width = 6.0 * sd_prior.max(sd_noise) + (m - z).abs();
        let n = 100_000usize;
        let step = 2.0 * half_width / n as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..=n {
            let eta = center - half_width + i as f64 * step;
            let log_w = -0.5 * h * (eta - m) * (eta - m) - 0.5 * h_eps * (z - eta) * (z - eta);
            let w = log_w.exp() * if i == 0 || i == n { 0.5 } else { 1.0 };
            num += eta * w;
            den += w;
        }
        num / den
    }

    #[test]
    fn mean_update_matches_quadrature_oracle() {
        let cases = [
            (0.0, 1.0, 2.0, 1.0),
            (5.0, 1.0, 5.0, 1.0),
            (-1.0, 0.5, 3.0, 2.0),
            (2.0, 4.0, -1.0, 0.25),
        ];
        for (m, h, z, h_eps) in cases {
            let p = params(h, h_eps, HDelta::Infinite);
            let analytic = mean_update(&BeliefState { m, h }, z, &p).unwrap().m;
            let oracle = posterior_mean_by_quadrature(m, h, z, h_eps);
            assert!(
                (analytic - oracle).abs() < 1e-10,
                "m={m} h={h} z={z} h_eps={h_eps}: {analytic} vs {oracle}"
            );
        }
    }
}
