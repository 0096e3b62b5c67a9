use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use career_lab::belief::steady_state;
use career_lab::equilibrium::{
    equilibrium_path, marginal_benefit_erratum, steady_state_gamma, weight_form_gamma, FocVariant,
};
use career_lab::export::{self, fmt_sig};
use career_lab::model::{CostSpec, HDelta, ModelParams};
use career_lab::sim::SimConfig;
use career_lab::statics::persistence_limit_scan;
use career_lab::verify::{run_verify, VerifyConfig};
use career_lab::{validate_params, with_workers, Error};

use crate::svg;

const SEED_ENV: &str = "CAREER_LAB_SEED";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(std::io::Error),
    Model(Error),
    VerificationFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::VerificationFailed => write!(f, "verification failed (see report)"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "career-lab",
    version,
    about = "Career-concerns equilibrium laboratory",
    after_help = "Exit codes: 0 success, 1 config error, 2 divergent regime, 3 verification failure."
)]
pub struct Cli {
    /// JSON config file; flags override file values, which override defaults
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write primary output to a file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(flatten)]
    flags: ParamFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamFlags {
    /// Prior mean of ability
    #[arg(long, global = true, allow_negative_numbers = true)]
    m1: Option<f64>,

    /// Prior precision of ability
    #[arg(long, global = true, allow_negative_numbers = true)]
    h1: Option<f64>,

    /// Output-noise precision
    #[arg(long = "h-eps", global = true, allow_negative_numbers = true)]
    h_eps: Option<f64>,

    /// Ability-shock precision: a positive number or "inf"
    #[arg(long = "h-delta", global = true, allow_hyphen_values = true)]
    h_delta: Option<HDelta>,

    /// Discount factor in [0, 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,

    /// Cost function: power:C:P or flat_then_power:K:C:P
    #[arg(long, global = true, value_parser = parse_cost_flag)]
    cost: Option<CostSpec>,

    /// Series truncation tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Horizon in periods
    #[arg(long = "T", global = true)]
    t_len: Option<usize>,

    /// Monte-Carlo replication count
    #[arg(long = "n-reps", global = true)]
    n_reps: Option<u64>,

    /// Master seed for all random draws (CAREER_LAB_SEED overrides)
    #[arg(long = "master-seed", global = true)]
    master_seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the per-period equilibrium path as CSV
    Path,
    /// Emit the stationary solution as JSON
    Steady,
    /// Compare the corrected marginal benefit against the published variants
    Errata {
        /// Comma-separated subset of {h10,h21}; default depends on h-delta
        #[arg(long, value_name = "LIST")]
        variants: Option<String>,
    },
    /// Run the full verification suite and emit a JSON report
    Verify {
        /// Worker threads for the Monte-Carlo stages
        #[arg(long)]
        workers: Option<usize>,

        /// Marginal-benefit variant injected into the effort solver
        /// (negative-control hook)
        #[arg(long = "solver-variant", hide = true)]
        solver_variant: Option<String>,
    },
    /// Sweep r, beta, or mu1 and emit CSV (optionally an SVG chart)
    Sweep {
        /// Variable to sweep: r, beta, or mu1
        #[arg(long)]
        var: String,

        /// Comma-separated sweep values (may be empty for a header-only CSV)
        #[arg(long, value_name = "LIST")]
        values: Option<String>,

        /// Linspace alternative to --values: MIN:MAX:N
        #[arg(long, value_name = "MIN:MAX:N")]
        grid: Option<String>,

        /// Write a single-series SVG chart to this path
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,

        /// Output column to chart (default: the last column)
        #[arg(long, value_name = "COLUMN")]
        y: Option<String>,
    },
}

/// Everything a run needs, after merging flags, file, defaults, and the
/// seed env var.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunConfig {
    pub params: ModelParams,
    pub cost: CostSpec,
    pub tol: f64,
    pub t_len: usize,
    pub n_reps: u64,
    pub master_seed: u64,
}

impl RunConfig {
    fn sim_config(&self) -> SimConfig {
        SimConfig {
            params: self.params,
            cost: self.cost,
            t_len: self.t_len,
            n_reps: self.n_reps,
            master_seed: self.master_seed,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    m1: Option<f64>,
    h1: Option<f64>,
    h_eps: Option<f64>,
    h_delta: Option<HDelta>,
    beta: Option<f64>,
    cost: Option<CostSpec>,
    tol: Option<f64>,
    #[serde(rename = "T")]
    t_len: Option<usize>,
    n_reps: Option<u64>,
    master_seed: Option<u64>,
}

fn parse_cost_flag(s: &str) -> Result<CostSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| -> Result<f64, String> {
        p.parse::<f64>().map_err(|e| format!("cost parameter {p:?}: {e}"))
    };
    match parts.as_slice() {
        ["power", c, p] => Ok(CostSpec::Power {
            c: num(c)?,
            p: num(p)?,
        }),
        ["flat_then_power", k, c, p] => Ok(CostSpec::FlatThenPower {
            k: num(k)?,
            c: num(c)?,
            p: num(p)?,
        }),
        _ => Err(format!(
            "cost must be power:C:P or flat_then_power:K:C:P, got {s:?}"
        )),
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let f = &cli.flags;
    let params = ModelParams {
        m1: f.m1.or(file.m1).unwrap_or(0.0),
        h1: f.h1.or(file.h1).unwrap_or(1.0),
        h_eps: f.h_eps.or(file.h_eps).unwrap_or(1.0),
        h_delta: f.h_delta.or(file.h_delta).unwrap_or(HDelta::Infinite),
        beta: f.beta.or(file.beta).unwrap_or(0.5),
    };
    let cost = f.cost.or(file.cost).unwrap_or(CostSpec::quadratic());
    let mut master_seed = f.master_seed.or(file.master_seed).unwrap_or(42);
    if let Ok(env_seed) = std::env::var(SEED_ENV) {
        master_seed = env_seed
            .parse::<u64>()
            .map_err(|e| CliError::Config(format!("{SEED_ENV}={env_seed:?}: {e}")))?;
    }
    let cfg = RunConfig {
        params,
        cost,
        tol: f.tol.or(file.tol).unwrap_or(1e-10),
        t_len: f.t_len.or(file.t_len).unwrap_or(10),
        n_reps: f.n_reps.or(file.n_reps).unwrap_or(100_000),
        master_seed,
    };
    if cfg.tol <= 0.0 {
        return Err(CliError::Config(format!(
            "tol must be positive, got {}",
            cfg.tol
        )));
    }
    if cfg.t_len < 1 || cfg.n_reps < 1 {
        return Err(CliError::Config(
            "T and n-reps must be at least 1".to_string(),
        ));
    }
    validate_params(&cfg.params, &cfg.cost)?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli)?;
    let output = match &cli.command {
        Command::Path => cmd_path(&cfg)?,
        Command::Steady => cmd_steady(&cfg)?,
        Command::Errata { variants } => cmd_errata(&cfg, variants.as_deref())?,
        Command::Verify {
            workers,
            solver_variant,
        } => cmd_verify(&cfg, *workers, solver_variant.as_deref())?,
        Command::Sweep {
            var,
            values,
            grid,
            svg,
            y,
        } => cmd_sweep(&cfg, var, values.as_deref(), grid.as_deref(), svg.as_deref(), y.as_deref())?,
    };
    match &cli.out {
        Some(path) => fs::write(path, output)?,
        None => print!("{output}"),
    }
    Ok(())
}

fn cmd_path(cfg: &RunConfig) -> Result<String, CliError> {
    let ep = equilibrium_path(&cfg.params, &cfg.cost, cfg.t_len, cfg.tol)?;
    Ok(export::csv_equilibrium_path(&ep))
}

#[derive(Serialize)]
struct SteadyOut {
    mu_star: f64,
    h_star: f64,
    gamma: f64,
    a_star: f64,
}

fn cmd_steady(cfg: &RunConfig) -> Result<String, CliError> {
    let ss = steady_state(&cfg.params)?;
    let gamma = steady_state_gamma(ss.mu_star, cfg.params.beta);
    let a_star = cfg.cost.marginal_cost_inverse(gamma)?;
    let out = SteadyOut {
        mu_star: ss.mu_star,
        h_star: ss.h_star,
        gamma,
        a_star,
    };
    Ok(format!("{}\n", serde_json::to_string_pretty(&out).unwrap()))
}

fn cmd_errata(cfg: &RunConfig, variants: Option<&str>) -> Result<String, CliError> {
    if cfg.params.beta >= 1.0 {
        return Err(CliError::Config(
            "errata comparison requires beta < 1".to_string(),
        ));
    }
    let persistent = cfg.params.h_delta.is_infinite();
    let (want_h10, want_h21) = match variants {
        None => (persistent, true),
        Some(list) => {
            let mut h10 = false;
            let mut h21 = false;
            for item in list.split(',').filter(|s| !s.is_empty()) {
                match item.trim() {
                    "h10" => h10 = true,
                    "h21" => h21 = true,
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown variant {other:?}: expected h10 or h21"
                        )))
                    }
                }
            }
            (h10, h21)
        }
    };
    if want_h10 && !persistent {
        return Err(CliError::Model(Error::VariantRequiresPersistentType));
    }

    let path = career_lab::belief::precision_path(&cfg.params, cfg.t_len);
    let beta = cfg.params.beta;
    let mut out = String::from("t,gamma_corrected,gamma_h10,gamma_h21,diff_h10,ratio_h21\n");
    for t in 1..=cfg.t_len {
        let corrected = marginal_benefit_erratum(FocVariant::Corrected, t, &path, beta, cfg.tol)?
            .gamma;
        let (h10, diff) = if want_h10 {
            let g = marginal_benefit_erratum(FocVariant::H10AsPublished, t, &path, beta, cfg.tol)?
                .gamma;
            (fmt_sig(g), fmt_sig(g - corrected))
        } else {
            (String::new(), String::new())
        };
        let (h21, ratio) = if want_h21 {
            let g = marginal_benefit_erratum(FocVariant::H21AsPublished, t, &path, beta, cfg.tol)?
                .gamma;
            let ratio = if corrected != 0.0 {
                fmt_sig(g / corrected)
            } else {
                String::new()
            };
            (fmt_sig(g), ratio)
        } else {
            (String::new(), String::new())
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t,
            fmt_sig(corrected),
            h10,
            h21,
            diff,
            ratio
        ));
    }
    Ok(out)
}

fn cmd_verify(
    cfg: &RunConfig,
    workers: Option<usize>,
    solver_variant: Option<&str>,
) -> Result<String, CliError> {
    let variant = match solver_variant {
        None | Some("corrected") => FocVariant::Corrected,
        Some("h21-as-published") => FocVariant::H21AsPublished,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown solver variant {other:?}"
            )))
        }
    };
    let verify_cfg = VerifyConfig {
        sim: cfg.sim_config(),
        solver_variant: variant,
    };
    let report = with_workers(workers, || run_verify(&verify_cfg))?;
    let text = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
    if report.all_pass {
        Ok(text)
    } else {
        // emit the report before signalling failure
        print!("{text}");
        Err(CliError::VerificationFailed)
    }
}

fn parse_sweep_values(
    values: Option<&str>,
    grid: Option<&str>,
) -> Result<Vec<f64>, CliError> {
    if values.is_some() && grid.is_some() {
        return Err(CliError::Config(
            "use either --values or --grid, not both".to_string(),
        ));
    }
    if let Some(spec) = grid {
        let parts: Vec<&str> = spec.split(':').collect();
        let [min, max, n] = parts.as_slice() else {
            return Err(CliError::Config(format!(
                "grid must be MIN:MAX:N, got {spec:?}"
            )));
        };
        let min: f64 = min
            .parse()
            .map_err(|e| CliError::Config(format!("grid min: {e}")))?;
        let max: f64 = max
            .parse()
            .map_err(|e| CliError::Config(format!("grid max: {e}")))?;
        let n: usize = n
            .parse()
            .map_err(|e| CliError::Config(format!("grid count: {e}")))?;
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            return Ok(vec![min]);
        }
        let step = (max - min) / (n - 1) as f64;
        return Ok((0..n).map(|i| min + i as f64 * step).collect());
    }
    match values {
        None => Err(CliError::Config(
            "sweep needs --values or --grid".to_string(),
        )),
        Some(list) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Config(format!("sweep value {s:?}: {e}")))
            })
            .collect(),
    }
}

fn cmd_sweep(
    cfg: &RunConfig,
    var: &str,
    values: Option<&str>,
    grid: Option<&str>,
    svg_path: Option<&std::path::Path>,
    y_col: Option<&str>,
) -> Result<String, CliError> {
    let xs = parse_sweep_values(values, grid)?;
    let (csv, columns, rows) = match var {
        "r" => {
            if cfg.params.beta >= 1.0 {
                return Err(CliError::Config(
                    "persistence sweep requires beta < 1".to_string(),
                ));
            }
            for &r in &xs {
                if r <= 0.0 {
                    return Err(CliError::Config(format!("r must be positive, got {r}")));
                }
            }
            let points = persistence_limit_scan(cfg.params.beta, &cfg.cost, &xs)?;
            let rows: Vec<Vec<f64>> = points
                .iter()
                .map(|p| vec![p.r, p.mu_star, p.gamma, p.a_star])
                .collect();
            (
                export::csv_persistence(&points),
                vec!["r", "mu_star", "gamma", "a_star"],
                rows,
            )
        }
        "beta" => {
            let ss = steady_state(&cfg.params)?;
            let mut out = String::from("beta,gamma,a_star\n");
            let mut rows = Vec::new();
            for &beta in &xs {
                if !(0.0..=1.0).contains(&beta) {
                    return Err(CliError::Config(format!(
                        "beta must lie in [0, 1], got {beta}"
                    )));
                }
                let gamma = steady_state_gamma(ss.mu_star, beta);
                let a_star = cfg.cost.marginal_cost_inverse(gamma)?;
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_sig(beta),
                    fmt_sig(gamma),
                    fmt_sig(a_star)
                ));
                rows.push(vec![beta, gamma, a_star]);
            }
            (out, vec!["beta", "gamma", "a_star"], rows)
        }
        "mu1" => {
            let mut out = String::from("mu1,gamma\n");
            let mut rows = Vec::new();
            for &mu1 in &xs {
                if !(0.0 < mu1 && mu1 < 1.0) {
                    return Err(CliError::Config(format!(
                        "mu1 must lie in (0, 1), got {mu1}"
                    )));
                }
                let gamma = weight_form_gamma(
                    FocVariant::Corrected,
                    mu1,
                    cfg.params.r(),
                    cfg.params.beta,
                    cfg.tol,
                )?
                .gamma;
                out.push_str(&format!("{},{}\n", fmt_sig(mu1), fmt_sig(gamma)));
                rows.push(vec![mu1, gamma]);
            }
            (out, vec!["mu1", "gamma"], rows)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown sweep variable {other:?}: expected r, beta, or mu1"
            )))
        }
    };

    if let Some(path) = svg_path {
        let y_name = y_col.unwrap_or(columns[columns.len() - 1]);
        let y_idx = columns
            .iter()
            .position(|c| *c == y_name)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown column {y_name:?}: expected one of {columns:?}"
                ))
            })?;
        let ys: Vec<f64> = rows.iter().map(|row| row[y_idx]).collect();
        let chart = svg::polyline_chart(&xs, &ys, var, y_name);
        fs::write(path, chart)?;
    }
    Ok(csv)
}
