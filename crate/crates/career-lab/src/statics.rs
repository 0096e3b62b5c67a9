//! Transient comparative statics: the b_s building blocks of the marginal
//! benefit, the identity linking consecutive blocks across periods, and the
//! numerical monotonicity and persistence scans built on them.
//!
//! Throughout, the weights mu_2, mu_3, ... are functions of the argument
//! mu_1, generated by iterating mu' = 1 / (2 + r - mu). The canonical block
//! is length-anchored,
//!
//! ```text
//! b_s(mu_t) = (1 - mu_t) * mu_{t+1} * ... * mu_{t+s-1},
//! ```
//!
//! so that gamma = sum_k beta^k b_k. The index-anchored definition used in
//! the original publication, b_s(mu_t) = (1 - mu_t) * mu_{t+1} * ... * mu_s,
//! is kept only inside the identity-residual demonstrations, where it shows
//! why the published recursion fails and how each repair restores it.

use serde::Serialize;

use crate::belief::{mu_star_of_r, mu_step};
use crate::equilibrium::SeriesSum;
use crate::error::Result;
use crate::model::CostSpec;

/// The weight sequence seeded at mu_1 with ratio r; entries are iterates of
/// the weight recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuPath {
    pub mu1: f64,
    pub r: f64,
}

impl MuPath {
    pub fn new(mu1: f64, r: f64) -> Self {
        assert!((0.0..1.0).contains(&mu1) && mu1 > 0.0, "mu1 must be in (0,1)");
        assert!(r >= 0.0, "r must be nonnegative");
        MuPath { mu1, r }
    }

    /// mu_i for 1-based i.
    pub fn get(&self, i: usize) -> f64 {
        assert!(i >= 1);
        let mut mu = self.mu1;
        for _ in 1..i {
            mu = mu_step(mu, self.r);
        }
        mu
    }
}

/// Marginal-benefit block b_s(mu_t): (1 - mu_t) times the product of the
/// next s - 1 weight iterates. b_1 is just 1 - mu_t.
pub fn b_s(mu_t: f64, s: usize, r: f64) -> f64 {
    assert!(s >= 1, "s is 1-based");
    assert!((0.0..1.0).contains(&mu_t) && mu_t > 0.0 && r >= 0.0);
    let mut out = 1.0 - mu_t;
    let mut mu = mu_t;
    for _ in 1..s {
        mu = mu_step(mu, r);
        out *= mu;
    }
    out
}

/// Index-anchored block used in the original publication: the product runs
/// from position t + 1 up to index s, where the argument sits at position t.
fn b_published(mu_arg: f64, t: usize, s: usize, r: f64) -> f64 {
    assert!(t >= 1 && s >= t);
    let mut out = 1.0 - mu_arg;
    let mut mu = mu_arg;
    for _ in (t + 1)..=s {
        mu = mu_step(mu, r);
        out *= mu;
    }
    out
}

/// Residual of the repaired cross-period identity
/// b_{s+1}(mu_1) = (1 - mu_1) / (1 + r - mu_1) * b_s(mu_2); zero up to
/// rounding for every mu_1, s, r.
pub fn transient_identity_residual(mu1: f64, s: usize, r: f64) -> f64 {
    let mu2 = mu_step(mu1, r);
    b_s(mu1, s + 1, r) - (1.0 - mu1) / (1.0 + r - mu1) * b_s(mu2, s, r)
}

/// Residual of the identity exactly as published, under the index-anchored
/// block definition; nonzero in general (vanishes only when mu_{s+1} = 1).
pub fn published_identity_residual(mu1: f64, s: usize, r: f64) -> f64 {
    let mu2 = mu_step(mu1, r);
    let lhs = b_published(mu1, 1, s + 1, r);
    let rhs = (1.0 - mu1) / (1.0 - mu2) * mu2 * b_published(mu2, 2, s, r);
    lhs - rhs
}

/// Residual of the alternative repair, which keeps the index-anchored
/// definition but replaces b_s by b_{s+1} on both sides; zero up to
/// rounding.
pub fn alternate_repair_residual(mu1: f64, s: usize, r: f64) -> f64 {
    let mu2 = mu_step(mu1, r);
    let lhs = b_published(mu1, 1, s + 1, r);
    let rhs = (1.0 - mu1) / (1.0 - mu2) * mu2 * b_published(mu2, 2, s + 1, r);
    lhs - rhs
}

/// gamma as the discounted block sum sum_k beta^k b_k(mu_1), truncated with
/// a certified geometric tail bound. An independent route to the same value
/// as the weight-form series evaluator.
pub fn gamma_from_b(mu1: f64, beta: f64, r: f64, tol: f64) -> Result<SeriesSum> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!((0.0..=1.0).contains(&beta));
    if beta == 1.0 && r == 0.0 {
        return Err(crate::error::Error::DivergentSeries);
    }
    if beta == 0.0 {
        return Ok(SeriesSum {
            gamma: 0.0,
            tail_bound: 0.0,
            terms_used: 0,
        });
    }
    let mu_star = if r == 0.0 { 1.0 } else { mu_star_of_r(r) };
    let mut mu = mu1;
    let mut block = 1.0 - mu1; // b_k with the products accumulated in place
    let mut beta_pow = 1.0;
    let mut sum = 0.0;
    let mut terms = 0usize;
    loop {
        terms += 1;
        beta_pow *= beta;
        let term = beta_pow * block;
        sum += term;
        let mu_next = mu_step(mu, r);
        // b_{k+1} / b_k = mu_{k+1}, so the tail is geometric with ratio
        // beta * max(mu_next, mu*)
        let q = mu_next.max(mu_star).min(1.0);
        let rho = beta * q;
        let mut bound = f64::INFINITY;
        if beta < 1.0 {
            bound = beta_pow * beta / (1.0 - beta);
        }
        if rho < 1.0 {
            bound = bound.min(term * rho / (1.0 - rho));
        }
        if bound <= tol {
            return Ok(SeriesSum {
                gamma: sum,
                tail_bound: bound,
                terms_used: terms,
            });
        }
        block *= mu_next;
        mu = mu_next;
    }
}

/// Grid evaluation of gamma as a function of mu_1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub mu_grid: Vec<f64>,
    pub gamma: Vec<f64>,
    pub strictly_decreasing: bool,
    /// Largest gamma[i+1] - gamma[i]; negative everywhere when strictly
    /// decreasing.
    pub worst_adjacent_diff: f64,
}

/// Evaluates gamma_from_b across a sorted grid of mu_1 values and reports
/// whether gamma strictly decreases.
pub fn monotonicity_scan(
    beta: f64,
    r: f64,
    grid: &[f64],
    tol: f64,
) -> Result<MonotonicityReport> {
    assert!(
        grid.windows(2).all(|w| w[0] < w[1]),
        "grid must be strictly increasing"
    );
    assert!(
        grid.iter().all(|&m| 0.0 < m && m < 1.0),
        "grid must lie in (0,1)"
    );
    let gamma = grid
        .iter()
        .map(|&mu1| gamma_from_b(mu1, beta, r, tol).map(|s| s.gamma))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = f64::NEG_INFINITY;
    for w in gamma.windows(2) {
        worst = worst.max(w[1] - w[0]);
    }
    if gamma.len() < 2 {
        worst = 0.0;
    }
    Ok(MonotonicityReport {
        mu_grid: grid.to_vec(),
        gamma: gamma.clone(),
        strictly_decreasing: gamma.len() >= 2 && worst < 0.0,
        worst_adjacent_diff: worst,
    })
}

/// One point of a persistence sweep: the stationary solution at ratio r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PersistencePoint {
    pub r: f64,
    pub mu_star: f64,
    pub gamma: f64,
    pub a_star: f64,
}

/// Stationary effort for each ratio in `r_seq`. As r falls toward zero the
/// effort falls toward zero for costs with g'(a) = 0 only at 0, and toward
/// the flat width k otherwise.
pub fn persistence_limit_scan(
    beta: f64,
    cost: &CostSpec,
    r_seq: &[f64],
) -> Result<Vec<PersistencePoint>> {
    assert!(beta < 1.0, "persistence scan is for discounted managers");
    r_seq
        .iter()
        .map(|&r| {
            assert!(r > 0.0, "ratios must be positive");
            let mu_star = mu_star_of_r(r);
            let gamma = crate::equilibrium::steady_state_gamma(mu_star, beta);
            let a_star = cost.marginal_cost_inverse(gamma)?;
            Ok(PersistencePoint {
                r,
                mu_star,
                gamma,
                a_star,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::precision_path;
    use crate::equilibrium::marginal_benefit_mu_form;
    use crate::model::{HDelta, ModelParams};

    #[test]
    fn b_s_examples() {
        assert!((b_s(0.5, 1, 1.0) - 0.5).abs() < 1e-15);
        assert!((b_s(0.5, 2, 1.0) - 0.2).abs() < 1e-15);
        // mu_3 = 1 / (3 - 0.4)
        assert!((b_s(0.5, 3, 1.0) - 0.2 / 2.6).abs() < 1e-15);
    }

    #[test]
    fn block_ratio_is_the_next_weight() {
        let path = MuPath::new(0.5, 1.0);
        for s in 1..=20 {
            let ratio = b_s(0.5, s + 1, 1.0) / b_s(0.5, s, 1.0);
            assert!((ratio - path.get(s + 1)).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn repaired_identity_holds() {
        assert!(transient_identity_residual(0.5, 1, 1.0).abs() < 1e-15);
        // stationary argument: both sides are (1 - mu*) mu*^s
        let mu_star = mu_star_of_r(1.0);
        for s in 1..=10 {
            assert!(transient_identity_residual(mu_star, s, 1.0).abs() < 1e-15);
        }
        for &r in &[0.1, 1.0, 10.0] {
            let mut mu1 = 0.05;
            while mu1 <= 0.951 {
                for s in 1..=20 {
                    let res = transient_identity_residual(mu1, s, r);
                    assert!(res.abs() <= 1e-12, "mu1={mu1} s={s} r={r}: {res}");
                }
                mu1 += 0.05;
            }
        }
    }

    #[test]
    fn published_identity_fails_in_general() {
        let res = published_identity_residual(0.5, 3, 1.0);
        assert!(res.abs() > 1e-3, "{res}");
        // hand expansion: lhs = 0.5 * mu2 mu3 mu4, rhs = 0.5 * mu2 mu3
        let m = MuPath::new(0.5, 1.0);
        let lhs = 0.5 * m.get(2) * m.get(3) * m.get(4);
        let rhs = 0.5 * m.get(2) * m.get(3);
        assert!((res - (lhs - rhs)).abs() < 1e-15);
    }

    #[test]
    fn alternate_repair_holds() {
        for &r in &[0.1, 1.0, 10.0] {
            let mut mu1 = 0.05;
            while mu1 <= 0.951 {
                for s in 1..=20 {
                    let res = alternate_repair_residual(mu1, s, r);
                    assert!(res.abs() <= 1e-12, "mu1={mu1} s={s} r={r}: {res}");
                }
                mu1 += 0.05;
            }
        }
    }

    #[test]
    fn gamma_from_b_values() {
        let mu_star = mu_star_of_r(1.0);
        let got = gamma_from_b(mu_star, 0.9, 1.0, 1e-12).unwrap();
        assert!((got.gamma - 0.847614).abs() < 1e-6);

        assert_eq!(gamma_from_b(0.5, 0.0, 1.0, 1e-12).unwrap().gamma, 0.0);

        // brute-force block sum
        let mut brute = 0.0;
        for k in 1..=200 {
            brute += 0.5f64.powi(k as i32) * b_s(0.5, k, 1.0);
        }
        let got = gamma_from_b(0.5, 0.5, 1.0, 1e-12).unwrap();
        assert!((got.gamma - brute).abs() < 1e-12);
    }

    #[test]
    fn gamma_from_b_matches_series_route() {
        // same value through the path-based weight-form evaluator
        for (h1, h_eps, h_delta, beta) in [
            (1.0, 1.0, 2.0, 0.5),
            (0.3, 2.0, 0.5, 0.9),
            (5.0, 0.2, 1.0, 0.99),
        ] {
            let p = ModelParams {
                m1: 0.0,
                h1,
                h_eps,
                h_delta: HDelta::Finite(h_delta),
                beta,
            };
            let path = precision_path(&p, 1);
            let mu1 = path.mu_at(1).unwrap();
            let a = gamma_from_b(mu1, beta, p.r(), 1e-12).unwrap();
            let b = marginal_benefit_mu_form(1, &path, beta, 1e-12).unwrap();
            assert!((a.gamma - b.gamma).abs() <= 2e-12);
        }
    }

    #[test]
    fn undiscounted_block_sum_needs_shocks() {
        assert!(gamma_from_b(0.5, 1.0, 0.5, 1e-10).is_ok());
        assert!(matches!(
            gamma_from_b(0.5, 1.0, 0.0, 1e-10),
            Err(crate::error::Error::DivergentSeries)
        ));
    }

    #[test]
    fn monotonicity_scan_basic() {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        let rep = monotonicity_scan(0.9, 1.0, &grid, 1e-10).unwrap();
        assert!(rep.strictly_decreasing);
        assert!(rep.worst_adjacent_diff < 0.0);

        // degenerate discount: all gammas zero, no strict decrease
        let rep0 = monotonicity_scan(0.0, 1.0, &grid, 1e-10).unwrap();
        assert!(!rep0.strictly_decreasing);
        assert!(rep0.gamma.iter().all(|&g| g == 0.0));

        let two = monotonicity_scan(0.5, 1.0, &[0.3, 0.7], 1e-12).unwrap();
        assert!(two.gamma[0] > two.gamma[1]);
    }

    #[test]
    fn persistence_scan_limits() {
        let quad = CostSpec::quadratic();
        let rs = [1.0, 0.1, 0.01, 0.001];
        let pts = persistence_limit_scan(0.9, &quad, &rs).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].a_star < w[0].a_star, "efforts must fall with r");
        }
        // oracle-chain value at r = 1e-3: mu* = 0.9688732708, gamma = 0.2188357833
        assert!((pts[3].a_star - 0.2188357833).abs() < 1e-9, "{}", pts[3].a_star);
        // the limit is zero: by r = 1e-8 effort is below 1e-3
        let tiny = persistence_limit_scan(0.9, &quad, &[1e-8]).unwrap();
        assert!(tiny[0].a_star < 1e-3, "{}", tiny[0].a_star);

        // flat cost: efforts fall toward the flat width instead
        let flat = CostSpec::FlatThenPower {
            k: 1.0,
            c: 1.0,
            p: 2.0,
        };
        let pts = persistence_limit_scan(0.9, &flat, &rs).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].a_star < w[0].a_star);
        }
        assert!(pts[3].a_star > 1.0);
        let tiny = persistence_limit_scan(0.9, &flat, &[1e-8]).unwrap();
        assert!((tiny[0].a_star - 1.0).abs() < 1e-3, "{}", tiny[0].a_star);

        // benefit vanishes with the discount as well
        let pts = persistence_limit_scan(1e-6, &quad, &[1.0]).unwrap();
        assert!(pts[0].a_star < 1e-5);
    }
}
