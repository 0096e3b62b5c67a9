//! Monte-Carlo simulation of the game under the computed strategy, plus
//! independent deviation-value oracles for the equilibrium conditions.
//!
//! Replications are fully deterministic: replication i draws from a ChaCha8
//! generator seeded with the master seed on stream i, and aggregation always
//! runs in replication-index order, so results are bit-identical for any
//! worker count. Deviation experiments reuse the same streams, which gives
//! common random numbers across arms for free.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::belief::{mean_update, precision_path, BeliefState, PrecisionPath};
use crate::equilibrium::{
    equilibrium_path, gamma_upper_bound, marginal_benefit, EquilibriumPath,
};
use crate::error::{Error, Result};
use crate::model::{CostSpec, HDelta, ModelParams};

/// Replication count below which variance calibration is refused.
pub const MIN_CALIBRATION_REPS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub cost: CostSpec,
    /// Simulated horizon (periods per replication).
    pub t_len: usize,
    pub n_reps: u64,
    pub master_seed: u64,
    /// Series tolerance for the effort path.
    pub tol: f64,
}

/// Per-period aggregates across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodStats {
    pub t: usize,
    /// Mean of y_t - w_t; zero in equilibrium by iterated expectations.
    pub mean_resid: f64,
    pub se_resid: f64,
    /// Mean of eta_t - m_t.
    pub mean_err: f64,
    pub se_err: f64,
    /// Sample variance of eta_t - m_t.
    pub var_err: f64,
    /// Conjugate posterior variance 1 / h_t.
    pub theory_var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStats {
    pub n_reps: u64,
    pub periods: Vec<PeriodStats>,
}

#[derive(Debug, Clone, Copy)]
enum FilterMode {
    Bayes,
    /// Negative control: the market never updates its belief.
    #[cfg_attr(not(test), allow(dead_code))]
    Frozen,
}

/// Simulates the game under the equilibrium strategy and wage rule.
///
/// Per replication: ability is drawn from the prior, each period adds output
/// noise (and an ability shock when the type is not persistent), the manager
/// plays the deterministic equilibrium effort, the market de-biases output
/// into a signal and updates its belief, and the wage pays the expected
/// output.
pub fn simulate(config: &SimConfig) -> Result<SimStats> {
    simulate_impl(config, FilterMode::Bayes)
}

fn simulate_impl(config: &SimConfig, filter: FilterMode) -> Result<SimStats> {
    assert!(config.t_len >= 1 && config.n_reps >= 1);
    let ep = equilibrium_path(&config.params, &config.cost, config.t_len, config.tol)?;
    let efforts = ep.effort_seq.clone();
    let path = precision_path(&config.params, config.t_len);

    let traces: Vec<Vec<(f64, f64)>> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| run_rep(rep, config, &efforts, filter))
        .collect();

    Ok(aggregate(config, &path, &traces))
}

/// One replication; returns (y_t - w_t, eta_t - m_t) per period.
fn run_rep(
    rep: u64,
    config: &SimConfig,
    efforts: &[f64],
    filter: FilterMode,
) -> Vec<(f64, f64)> {
    let p = &config.params;
    let mut rng = rep_rng(config.master_seed, rep);
    let eta0 = Normal::new(p.m1, (1.0 / p.h1).sqrt()).unwrap();
    let eps = Normal::new(0.0, (1.0 / p.h_eps).sqrt()).unwrap();
    let shock = match p.h_delta {
        HDelta::Finite(hd) => Some(Normal::new(0.0, (1.0 / hd).sqrt()).unwrap()),
        HDelta::Infinite => None,
    };

    let mut eta = eta0.sample(&mut rng);
    let mut belief = BeliefState { m: p.m1, h: p.h1 };
    let mut out = Vec::with_capacity(config.t_len);
    for &a_star in efforts {
        let y = eta + a_star + eps.sample(&mut rng);
        let w = belief.m + a_star;
        out.push((y - w, eta - belief.m));
        if let FilterMode::Bayes = filter {
            let z = y - a_star;
            belief = mean_update(&belief, z, p).expect("finite signal");
        }
        if let Some(shock) = &shock {
            eta += shock.sample(&mut rng);
        }
    }
    out
}

fn rep_rng(master_seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep);
    rng
}

fn aggregate(config: &SimConfig, path: &PrecisionPath, traces: &[Vec<(f64, f64)>]) -> SimStats {
    let n = traces.len();
    let nf = n as f64;
    let mut periods = Vec::with_capacity(config.t_len);
    for t in 0..config.t_len {
        let mut sum_r = 0.0;
        let mut sum_e = 0.0;
        for trace in traces {
            sum_r += trace[t].0;
            sum_e += trace[t].1;
        }
        let mean_resid = sum_r / nf;
        let mean_err = sum_e / nf;
        let (mut ss_r, mut ss_e) = (0.0, 0.0);
        for trace in traces {
            ss_r += (trace[t].0 - mean_resid).powi(2);
            ss_e += (trace[t].1 - mean_err).powi(2);
        }
        let (var_resid, var_err) = if n > 1 {
            (ss_r / (nf - 1.0), ss_e / (nf - 1.0))
        } else {
            (0.0, 0.0)
        };
        periods.push(PeriodStats {
            t: t + 1,
            mean_resid,
            se_resid: (var_resid / nf).sqrt(),
            mean_err,
            se_err: (var_err / nf).sqrt(),
            var_err,
            theory_var: 1.0 / path.h_at(t + 1).expect("path covers horizon"),
        });
    }
    SimStats {
        n_reps: config.n_reps,
        periods,
    }
}

/// Gaussian-filter calibration verdict: compares the sample variance of
/// eta_t - m_t against the conjugate posterior variance, period by period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    /// Relative standard error of a variance estimate, sqrt(2 / (n - 1)).
    pub rel_se: f64,
    /// Per-period deviation from theory in units of rel_se.
    pub z_scores: Vec<f64>,
    /// 1-based periods where |z| exceeds 5.
    pub flagged: Vec<usize>,
    pub worst_abs_z: f64,
    pub pass: bool,
}

pub fn filter_calibration(stats: &SimStats) -> Result<CalibrationReport> {
    if stats.n_reps < MIN_CALIBRATION_REPS {
        return Err(Error::TooFewReplications {
            got: stats.n_reps,
            needed: MIN_CALIBRATION_REPS,
        });
    }
    let rel_se = (2.0 / (stats.n_reps as f64 - 1.0)).sqrt();
    let mut z_scores = Vec::with_capacity(stats.periods.len());
    let mut flagged = Vec::new();
    let mut worst: f64 = 0.0;
    for p in &stats.periods {
        let z = (p.var_err - p.theory_var) / (p.theory_var * rel_se);
        worst = worst.max(z.abs());
        if z.abs() > 5.0 {
            flagged.push(p.t);
        }
        z_scores.push(z);
    }
    Ok(CalibrationReport {
        rel_se,
        z_scores,
        flagged: flagged.clone(),
        worst_abs_z: worst,
        pass: flagged.is_empty(),
    })
}

/// The effort-dependent part of the manager's period-t objective:
/// -g(a_hat) + (a_hat - a*_t) gamma_t. All omitted summands are independent
/// of a_hat, so the argmax and derivative checks are unaffected.
pub fn deviation_objective(
    t: usize,
    a_hat: f64,
    path: &PrecisionPath,
    cost: &CostSpec,
    tol: f64,
) -> Result<f64> {
    let beta = path.params().beta;
    assert!(beta < 1.0, "deviation values need a discounted manager");
    let gamma = marginal_benefit(t, path, beta, tol)?.gamma;
    let a_star = cost.marginal_cost_inverse(gamma.max(0.0))?;
    Ok(-cost.cost(a_hat)? + (a_hat - a_star) * gamma)
}

/// Best-response diagnostics at period t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub t: usize,
    pub a_star: f64,
    /// Grid-plus-golden-section argmax of the deviation objective.
    pub argmax: f64,
    /// Finite-difference derivative of the objective at a_star
    /// (symmetric with step 1e-5 at interior points, forward at 0).
    pub fd_derivative: f64,
    /// gamma_t - g'(a_star); zero up to rounding by construction.
    pub foc_gap: f64,
    /// True when the whole flat region [0, k] is optimal; `argmax` then
    /// reports the convention value k.
    pub flat_argmax: bool,
}

/// Maximizes the deviation objective over [0, g'^{-1}(beta/(1-beta)) + 1]
/// by a 1000-point grid followed by golden-section refinement.
pub fn best_response(
    t: usize,
    path: &PrecisionPath,
    cost: &CostSpec,
    tol: f64,
) -> Result<DeviationReport> {
    let beta = path.params().beta;
    assert!(beta < 1.0, "deviation values need a discounted manager");
    let gamma = marginal_benefit(t, path, beta, tol)?.gamma;
    let a_star = cost.marginal_cost_inverse(gamma.max(0.0))?;
    let foc_gap = gamma - cost.marginal_cost(a_star)?;

    if gamma <= 0.0 && cost.flat_width() > 0.0 {
        // every point of [0, k] attains the maximum; report the convention
        let fd = fd_derivative(|a| objective_at(a, a_star, gamma, cost), a_star);
        return Ok(DeviationReport {
            t,
            a_star,
            argmax: cost.flat_width(),
            fd_derivative: fd,
            foc_gap,
            flat_argmax: true,
        });
    }

    let hi = cost.marginal_cost_inverse(gamma_upper_bound(beta))? + 1.0;
    let f = |a: f64| objective_at(a, a_star, gamma, cost);

    const GRID: usize = 1000;
    let step = hi / GRID as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let v = f(i as f64 * step);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo_b = if best_i == 0 { 0.0 } else { (best_i - 1) as f64 * step };
    let hi_b = ((best_i + 1).min(GRID)) as f64 * step;
    let argmax = golden_section_max(f, lo_b, hi_b, 1e-8);

    let fd = fd_derivative(f, a_star);
    Ok(DeviationReport {
        t,
        a_star,
        argmax,
        fd_derivative: fd,
        foc_gap,
        flat_argmax: false,
    })
}

fn objective_at(a: f64, a_star: f64, gamma: f64, cost: &CostSpec) -> f64 {
    -cost.cost(a).expect("nonnegative effort") + (a - a_star) * gamma
}

fn fd_derivative(f: impl Fn(f64) -> f64, a: f64) -> f64 {
    const STEP: f64 = 1e-5;
    if a >= STEP {
        (f(a + STEP) - f(a - STEP)) / (2.0 * STEP)
    } else {
        (f(a + STEP) - f(a)) / STEP
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const RESP: f64 = 2.0 - 1.618_033_988_749_895;
    let mut x1 = a + RESP * (b - a);
    let mut x2 = b - RESP * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + RESP * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - RESP * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        x1
    } else {
        x2
    }
}

/// Monte-Carlo estimate of the discounted expected wage stream after t when
/// the manager plays `a_hat` at t (the market still de-biases by a*_t) and
/// follows the equilibrium afterward. Returns (value, standard error).
pub fn mc_deviation_value(
    t: usize,
    a_hat: f64,
    config: &SimConfig,
    tol: f64,
) -> Result<(f64, f64)> {
    let run = deviation_run(t, a_hat, config, tol)?;
    Ok(mean_se(&run.values))
}

/// Paired-slope estimate: (value(a_hat) - value(a*_t)) / (a_hat - a*_t) per
/// replication under common random numbers, with its standard error and the
/// certified horizon-truncation bound for the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub se: f64,
    /// Upper bound on the slope error from cutting the horizon.
    pub mc_tail_bound: f64,
    pub horizon: usize,
}

pub fn mc_deviation_slope(
    t: usize,
    a_hat: f64,
    config: &SimConfig,
    tol: f64,
) -> Result<SlopeEstimate> {
    let dev = deviation_run(t, a_hat, config, tol)?;
    let base = deviation_run(t, dev.a_star, config, tol)?;
    let delta = a_hat - dev.a_star;
    assert!(delta != 0.0, "slope needs a nonzero deviation");
    let diffs: Vec<f64> = dev
        .values
        .iter()
        .zip(&base.values)
        .map(|(a, b)| (a - b) / delta)
        .collect();
    let (slope, se) = mean_se(&diffs);
    Ok(SlopeEstimate {
        slope,
        se,
        mc_tail_bound: dev.slope_tail_bound,
        horizon: dev.horizon,
    })
}

struct DeviationRun {
    values: Vec<f64>,
    a_star: f64,
    horizon: usize,
    slope_tail_bound: f64,
}

fn deviation_run(t: usize, a_hat: f64, config: &SimConfig, tol: f64) -> Result<DeviationRun> {
    let p = &config.params;
    let beta = p.beta;
    if beta >= 1.0 {
        return Err(Error::DivergentSeries);
    }
    if a_hat < 0.0 {
        return Err(Error::NegativeEffort(a_hat));
    }
    assert!(t >= 1 && t <= config.t_len);

    if beta == 0.0 {
        return Ok(DeviationRun {
            values: vec![0.0; config.n_reps as usize],
            a_star: config
                .cost
                .marginal_cost_inverse(0.0)?,
            horizon: t,
            slope_tail_bound: 0.0,
        });
    }

    let a_max = config.cost.marginal_cost_inverse(gamma_upper_bound(beta))? + 1.0;
    let horizon = deviation_horizon(t, a_max, p, tol).max(config.t_len);
    let ep: EquilibriumPath = equilibrium_path(p, &config.cost, horizon, tol)?;
    let efforts = ep.effort_seq.clone();
    let a_star = efforts[t - 1];

    let values: Vec<f64> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| deviation_rep_value(rep, config, &efforts, t, a_hat, horizon))
        .collect();

    // discounted impulse responses beyond the horizon are each at most 1
    let slope_tail_bound = beta.powi((horizon + 1 - t) as i32) / (1.0 - beta);
    Ok(DeviationRun {
        values,
        a_star,
        horizon,
        slope_tail_bound,
    })
}

/// Horizon H with discounted wage tail below tol, using the documented wage
/// bound |w| <= |m1| + effort bound + 6 posterior standard deviations. The
/// mean-belief spread grows with accumulated ability shocks, so the bound is
/// re-evaluated once at the first-pass horizon.
fn deviation_horizon(t: usize, a_max: f64, p: &ModelParams, tol: f64) -> usize {
    let beta = p.beta;
    let sd_at = |periods: usize| -> f64 {
        let shock_var = match p.h_delta {
            HDelta::Infinite => 0.0,
            HDelta::Finite(hd) => periods as f64 / hd,
        };
        (1.0 / p.h1 + shock_var).sqrt()
    };
    let horizon_for = |w_bound: f64| -> usize {
        // beta^(H - t) / (1 - beta) * w <= tol
        let target = tol * (1.0 - beta) / w_bound.max(f64::MIN_POSITIVE);
        let n = (target.ln() / beta.ln()).ceil().max(1.0) as usize;
        t + n
    };
    let h1 = horizon_for(p.m1.abs() + a_max + 6.0 * sd_at(0));
    horizon_for(p.m1.abs() + a_max + 6.0 * sd_at(h1))
}

fn deviation_rep_value(
    rep: u64,
    config: &SimConfig,
    efforts: &[f64],
    t_dev: usize,
    a_hat: f64,
    horizon: usize,
) -> f64 {
    let p = &config.params;
    let beta = p.beta;
    let mut rng = rep_rng(config.master_seed, rep);
    let eta0 = Normal::new(p.m1, (1.0 / p.h1).sqrt()).unwrap();
    let eps = Normal::new(0.0, (1.0 / p.h_eps).sqrt()).unwrap();
    let shock = match p.h_delta {
        HDelta::Finite(hd) => Some(Normal::new(0.0, (1.0 / hd).sqrt()).unwrap()),
        HDelta::Infinite => None,
    };

    let mut eta = eta0.sample(&mut rng);
    let mut belief = BeliefState { m: p.m1, h: p.h1 };
    let mut value = 0.0;
    let mut disc = 1.0; // beta^(tau - t_dev) once tau > t_dev
    for tau in 1..=horizon {
        let a_conj = efforts[tau - 1];
        let a_play = if tau == t_dev { a_hat } else { a_conj };
        if tau > t_dev {
            disc *= beta;
            value += disc * (belief.m + a_conj);
        }
        let y = eta + a_play + eps.sample(&mut rng);
        let z = y - a_conj;
        belief = mean_update(&belief, z, p).expect("finite signal");
        if let Some(shock) = &shock {
            eta += shock.sample(&mut rng);
        }
    }
    value
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn persistent_config(n_reps: u64) -> SimConfig {
        SimConfig {
            params: ModelParams {
                m1: 0.0,
                h1: 1.0,
                h_eps: 1.0,
                h_delta: HDelta::Infinite,
                beta: 0.5,
            },
            cost: CostSpec::quadratic(),
            t_len: 10,
            n_reps,
            master_seed: 42,
            tol: 1e-10,
        }
    }

    #[test]
    fn wage_residuals_center_on_zero() {
        let cfg = persistent_config(20_000);
        let stats = simulate(&cfg).unwrap();
        for p in &stats.periods {
            assert!(
                p.mean_resid.abs() <= 3.0 * p.se_resid,
                "t={}: resid {} se {}",
                p.t,
                p.mean_resid,
                p.se_resid
            );
        }
    }

    #[test]
    fn calibrated_filter_passes() {
        let cfg = persistent_config(20_000);
        let stats = simulate(&cfg).unwrap();
        let report = filter_calibration(&stats).unwrap();
        assert!(report.pass, "flags: {:?}", report.flagged);
    }

    #[test]
    fn frozen_belief_flags_from_second_period() {
        let cfg = persistent_config(20_000);
        let stats = simulate_impl(&cfg, FilterMode::Frozen).unwrap();
        let report = filter_calibration(&stats).unwrap();
        assert!(!report.pass);
        assert_eq!(report.flagged.first(), Some(&2));
        assert_eq!(report.flagged.len(), cfg.t_len - 1);
    }

    #[test]
    fn near_noiseless_observation_pins_beliefs() {
        let mut cfg = persistent_config(200);
        cfg.params.h_eps = 1e12;
        cfg.t_len = 4;
        let stats = simulate(&cfg).unwrap();
        for p in stats.periods.iter().skip(1) {
            assert!(p.var_err < 1e-10, "t={}: {}", p.t, p.var_err);
            assert!(p.mean_resid.abs() < 1e-3);
        }
    }

    #[test]
    fn single_replication_is_finite() {
        let mut cfg = persistent_config(1);
        cfg.t_len = 3;
        let stats = simulate(&cfg).unwrap();
        for p in &stats.periods {
            assert!(p.mean_resid.is_finite());
            assert_eq!(p.se_resid, 0.0);
            assert_eq!(p.var_err, 0.0);
        }
        assert!(matches!(
            filter_calibration(&stats),
            Err(Error::TooFewReplications { got: 1, .. })
        ));
    }

    #[test]
    fn divergent_regime_propagates() {
        let mut cfg = persistent_config(10);
        cfg.params.beta = 1.0;
        assert!(matches!(simulate(&cfg), Err(Error::DivergentSeries)));
    }

    #[test]
    fn simulation_is_deterministic_across_worker_counts() {
        let cfg = persistent_config(4_096);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate(&cfg).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| simulate(&cfg).unwrap());
        assert_eq!(one, four);
        for (a, b) in one.periods.iter().zip(&four.periods) {
            assert_eq!(a.mean_resid.to_bits(), b.mean_resid.to_bits());
            assert_eq!(a.var_err.to_bits(), b.var_err.to_bits());
        }
    }

    #[test]
    fn deviation_objective_values() {
        let cfg = persistent_config(1);
        let path = precision_path(&cfg.params, 10);
        let gamma = marginal_benefit(1, &path, 0.5, 1e-12).unwrap().gamma;

        // stationary point at a*
        let f = |a: f64| deviation_objective(1, a, &path, &cfg.cost, 1e-12).unwrap();
        let step = 1e-5;
        let fd = (f(gamma + step) - f(gamma - step)) / (2.0 * step);
        assert!(fd.abs() <= 1e-6, "{fd}");

        // value at zero effort: -(0 - a*) gamma with zero cost
        let v0 = f(0.0);
        assert!((v0 - (-gamma * gamma)).abs() < 1e-10);
        assert!((v0 + 0.149223).abs() < 1e-6);
    }

    #[test]
    fn best_response_matches_equilibrium_effort() {
        let cfg = persistent_config(1);
        let path = precision_path(&cfg.params, 10);
        for t in [1usize, 3, 10] {
            let rep = best_response(t, &path, &cfg.cost, 1e-12).unwrap();
            assert!(
                (rep.argmax - rep.a_star).abs() <= 1e-6,
                "t={t}: {} vs {}",
                rep.argmax,
                rep.a_star
            );
            assert!(rep.fd_derivative.abs() <= 1e-6);
            assert!(rep.foc_gap.abs() <= 1e-10);
            assert!(!rep.flat_argmax);
        }
    }

    #[test]
    fn best_response_on_strictly_convex_branch_of_flat_cost() {
        let mut cfg = persistent_config(1);
        cfg.cost = CostSpec::FlatThenPower {
            k: 1.0,
            c: 2.0,
            p: 3.0,
        };
        let path = precision_path(&cfg.params, 5);
        let gamma = marginal_benefit(2, &path, 0.5, 1e-12).unwrap().gamma;
        let rep = best_response(2, &path, &cfg.cost, 1e-12).unwrap();
        let closed_form = 1.0 + (gamma / 2.0).sqrt();
        assert!((rep.argmax - closed_form).abs() <= 1e-6);
    }

    #[test]
    fn flat_cost_zero_benefit_reports_convention() {
        let mut cfg = persistent_config(1);
        cfg.params.beta = 0.0;
        cfg.cost = CostSpec::FlatThenPower {
            k: 1.5,
            c: 1.0,
            p: 2.0,
        };
        let path = precision_path(&cfg.params, 3);
        let rep = best_response(1, &path, &cfg.cost, 1e-12).unwrap();
        assert!(rep.flat_argmax);
        assert_eq!(rep.argmax, 1.5);
        assert_eq!(rep.a_star, 1.5);
    }

    #[test]
    fn zero_discount_deviation_value_is_zero() {
        let mut cfg = persistent_config(100);
        cfg.params.beta = 0.0;
        let (v, se) = mc_deviation_value(1, 1.0, &cfg, 1e-10).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn equal_action_arms_coincide() {
        let cfg = persistent_config(500);
        let path = precision_path(&cfg.params, cfg.t_len);
        let gamma = marginal_benefit(1, &path, 0.5, 1e-10).unwrap().gamma;
        let (v_star, _) = mc_deviation_value(1, gamma, &cfg, 1e-10).unwrap();
        let (v_again, _) = mc_deviation_value(1, gamma, &cfg, 1e-10).unwrap();
        assert_eq!(v_star.to_bits(), v_again.to_bits());
    }

    #[test]
    fn mc_slope_matches_analytic_gamma() {
        let cfg = persistent_config(2_000);
        let path = precision_path(&cfg.params, cfg.t_len);
        let gamma = marginal_benefit(1, &path, 0.5, 1e-12).unwrap();
        let a_star = gamma.gamma;
        let est = mc_deviation_slope(1, a_star + 1.0, &cfg, 1e-12).unwrap();
        let allowance = 3.0 * est.se + est.mc_tail_bound + gamma.tail_bound;
        assert!(
            (est.slope - gamma.gamma).abs() <= allowance,
            "slope {} gamma {} allowance {allowance}",
            est.slope,
            gamma.gamma
        );
    }
}
