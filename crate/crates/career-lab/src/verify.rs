//! The bundled verification suite: every check the equilibrium must survive,
//! with per-check diagnostics, run from one config. Backs the `verify`
//! command and the acceptance tests.
//!
//! The report is fully deterministic for a fixed master seed (no clocks, no
//! thread-count sensitivity), so byte-identical reruns are part of the
//! contract.

use serde::Serialize;
use serde_json::json;

use crate::equilibrium::{
    equilibrium_path_for_variant, marginal_benefit, weight_form_gamma, FocVariant,
};
use crate::error::Result;
use crate::sim::{
    best_response, deviation_objective, filter_calibration, mc_deviation_slope, simulate,
    SimConfig,
};
use crate::statics::{monotonicity_scan, transient_identity_residual};

/// Residual tolerance for the cross-period identity check.
const TRANSIENT_TOL: f64 = 1e-12;
/// Finite-difference and best-response agreement tolerance.
const FOC_TOL: f64 = 1e-6;
/// Standard-error multiple for the wage-consistency and slope checks.
const SE_MULT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub sim: SimConfig,
    /// Marginal-benefit variant driving the effort solver. `Corrected` in
    /// production; the published variants exist as negative controls and
    /// must make the suite fail.
    pub solver_variant: FocVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

/// Runs the full suite. Errors are config-level problems (divergent regime,
/// too few replications); check failures land in the report instead.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let sim_cfg = &cfg.sim;
    let params = &sim_cfg.params;
    let tol = sim_cfg.tol;
    let mut checks = Vec::new();

    // efforts the manager actually plays, per the configured solver variant
    let solver_path = equilibrium_path_for_variant(
        cfg.solver_variant,
        params,
        &sim_cfg.cost,
        sim_cfg.t_len,
        tol,
    )?;
    let path = &solver_path.precision;

    // 1. wages equal expected output on average, every period
    let stats = simulate(sim_cfg)?;
    {
        let mut worst_z: f64 = 0.0;
        let mut pass = true;
        for p in &stats.periods {
            let z = if p.se_resid > 0.0 {
                p.mean_resid.abs() / p.se_resid
            } else {
                0.0
            };
            worst_z = worst_z.max(z);
            pass &= z <= SE_MULT;
        }
        checks.push(CheckResult {
            name: "wage_consistency",
            pass,
            detail: json!({
                "periods": stats.periods.len(),
                "worst_abs_z": worst_z,
                "se_mult": SE_MULT,
            }),
        });
    }

    // 2. posterior variance matches the conjugate filter
    let calibration = filter_calibration(&stats)?;
    checks.push(CheckResult {
        name: "filter_calibration",
        pass: calibration.pass,
        detail: json!({
            "worst_abs_z": calibration.worst_abs_z,
            "flagged_periods": calibration.flagged,
            "rel_se": calibration.rel_se,
        }),
    });

    let check_ts = check_periods(sim_cfg.t_len);

    // 3. the played effort is a stationary point of the true objective
    {
        let mut worst_fd: f64 = 0.0;
        let mut pass = true;
        for &t in &check_ts {
            let a_t = solver_path.effort_seq[t - 1];
            let step = 1e-5;
            let up = deviation_objective(t, a_t + step, path, &sim_cfg.cost, tol)?;
            let fd = if a_t >= step {
                let down = deviation_objective(t, a_t - step, path, &sim_cfg.cost, tol)?;
                (up - down) / (2.0 * step)
            } else {
                let at = deviation_objective(t, a_t, path, &sim_cfg.cost, tol)?;
                (up - at) / step
            };
            worst_fd = worst_fd.max(fd.abs());
            pass &= fd.abs() <= FOC_TOL;
        }
        checks.push(CheckResult {
            name: "foc_stationarity",
            pass,
            detail: json!({
                "ts": check_ts,
                "worst_abs_fd_derivative": worst_fd,
                "tol": FOC_TOL,
            }),
        });
    }

    // 4. grid-plus-refinement argmax agrees with the played effort
    {
        let mut worst_gap: f64 = 0.0;
        let mut pass = true;
        for &t in &check_ts {
            let report = best_response(t, path, &sim_cfg.cost, tol)?;
            let gap = (report.argmax - solver_path.effort_seq[t - 1]).abs();
            worst_gap = worst_gap.max(gap);
            pass &= gap <= FOC_TOL;
        }
        checks.push(CheckResult {
            name: "best_response_agreement",
            pass,
            detail: json!({
                "ts": check_ts,
                "worst_abs_gap": worst_gap,
                "tol": FOC_TOL,
            }),
        });
    }

    // 5. Monte-Carlo deviation slope reproduces the analytic benefit
    {
        let t = 1;
        let gamma = marginal_benefit(t, path, params.beta, tol)?;
        let a_hat = solver_path.effort_seq[t - 1] + 1.0;
        let est = mc_deviation_slope(t, a_hat, sim_cfg, tol)?;
        let allowance = SE_MULT * est.se + est.mc_tail_bound + gamma.tail_bound;
        let gap = (est.slope - gamma.gamma).abs();
        checks.push(CheckResult {
            name: "mc_deviation_slope",
            pass: gap <= allowance,
            detail: json!({
                "t": t,
                "slope": est.slope,
                "gamma": gamma.gamma,
                "se": est.se,
                "mc_tail_bound": est.mc_tail_bound,
                "series_tail_bound": gamma.tail_bound,
                "allowance": allowance,
            }),
        });
    }

    // 6. the marginal benefit decreases in the current weight
    {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        let r = params.r();
        let (pass, worst) = match cfg.solver_variant {
            FocVariant::Corrected => {
                let rep = monotonicity_scan(params.beta, r, &grid, tol)?;
                (rep.strictly_decreasing, rep.worst_adjacent_diff)
            }
            variant => {
                // evaluate the injected variant's own gamma function
                let gamma: Vec<f64> = grid
                    .iter()
                    .map(|&mu| weight_form_gamma(variant, mu, r, params.beta, tol).map(|s| s.gamma))
                    .collect::<Result<_>>()?;
                let worst = gamma
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                (worst < 0.0, worst)
            }
        };
        checks.push(CheckResult {
            name: "gamma_monotone_in_mu",
            pass,
            detail: json!({
                "grid_points": grid.len(),
                "worst_adjacent_diff": worst,
            }),
        });
    }

    // 7. the repaired cross-period identity holds to rounding
    {
        let mut rs = vec![0.1, 1.0, 10.0];
        let r_cfg = params.r();
        if r_cfg > 0.0 && !rs.contains(&r_cfg) {
            rs.push(r_cfg);
        }
        let mut worst: f64 = 0.0;
        for &r in &rs {
            for i in 1..=19 {
                let mu1 = i as f64 * 0.05;
                for s in 1..=20 {
                    worst = worst.max(transient_identity_residual(mu1, s, r).abs());
                }
            }
        }
        checks.push(CheckResult {
            name: "transient_identity",
            pass: worst <= TRANSIENT_TOL,
            detail: json!({
                "worst_abs_residual": worst,
                "tol": TRANSIENT_TOL,
            }),
        });
    }

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        config: *cfg,
        checks,
        all_pass,
    })
}

/// Early, middle, final periods of the horizon.
fn check_periods(t_len: usize) -> Vec<usize> {
    let mut ts = vec![1, 3.min(t_len), t_len];
    ts.dedup();
    ts
}
