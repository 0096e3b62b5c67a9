//! Plain-text emission: stable 12-significant-digit number formatting and
//! the CSV table layouts. Output is byte-stable for golden files: '.'
//! decimal separator, no grouping, no locale dependence.

use crate::belief::PrecisionPath;
use crate::equilibrium::EquilibriumPath;
use crate::sim::{CalibrationReport, SimStats};
use crate::statics::{MonotonicityReport, PersistencePoint};

const SIG_DIGITS: i32 = 12;

/// Formats with 12 significant digits, trimming trailing zeros; switches to
/// exponent notation outside [1e-4, 1e12).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..SIG_DIGITS).contains(&mag) {
        let decimals = (SIG_DIGITS - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let t = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.')
        } else {
            &s
        };
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        let s = format!("{x:.*e}", (SIG_DIGITS - 1) as usize);
        match s.split_once('e') {
            Some((mant, exp)) => {
                let mant = mant.trim_end_matches('0').trim_end_matches('.');
                format!("{mant}e{exp}")
            }
            None => s,
        }
    }
}

pub fn csv_precision_path(path: &PrecisionPath) -> String {
    let mut out = String::from("t,h_t,mu_t\n");
    for (i, (&h, &mu)) in path.h_seq().iter().zip(path.mu_seq()).enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, fmt_sig(h), fmt_sig(mu)));
    }
    out
}

pub fn csv_equilibrium_path(ep: &EquilibriumPath) -> String {
    let mut out = String::from("t,h_t,mu_t,gamma_t,a_star_t,terms_used,tail_bound\n");
    for i in 0..ep.gamma_seq.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            fmt_sig(ep.precision.h_seq()[i]),
            fmt_sig(ep.precision.mu_seq()[i]),
            fmt_sig(ep.gamma_seq[i]),
            fmt_sig(ep.effort_seq[i]),
            ep.trunc_report[i].terms_used,
            fmt_sig(ep.trunc_report[i].tail_bound),
        ));
    }
    out
}

pub fn csv_sim_stats(stats: &SimStats, calibration: &CalibrationReport) -> String {
    let mut out = String::from("t,mean_resid,se_resid,var_eta_minus_m,theory_var,flag\n");
    for p in &stats.periods {
        let flag = calibration.flagged.contains(&p.t);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.t,
            fmt_sig(p.mean_resid),
            fmt_sig(p.se_resid),
            fmt_sig(p.var_err),
            fmt_sig(p.theory_var),
            flag,
        ));
    }
    out
}

pub fn csv_monotonicity(report: &MonotonicityReport) -> String {
    let mut out = String::from("mu1,gamma\n");
    for (mu, g) in report.mu_grid.iter().zip(&report.gamma) {
        out.push_str(&format!("{},{}\n", fmt_sig(*mu), fmt_sig(*g)));
    }
    out
}

pub fn csv_persistence(points: &[PersistencePoint]) -> String {
    let mut out = String::from("r,mu_star,gamma,a_star\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(p.r),
            fmt_sig(p.mu_star),
            fmt_sig(p.gamma),
            fmt_sig(p.a_star),
        ));
    }
    out
}
