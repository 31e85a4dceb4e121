//! Command-line surface: `run`, `list`, `decay`, `simulate`, `scaling`,
//! `spectrum`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mminf_core::queue::{entropy_decay_curve, spectral_gap, spectrum};
use mminf_core::registry::{entries, Registry};
use mminf_core::scaling::{ou_local_check, poisson_to_gauss, TestFunction};
use mminf_core::simulator::simulate_path;
use mminf_core::{DiscreteMeasure, GridFunction, PhiFamily, PhiFunction, QueueParams};
use serde::Serialize;

use crate::config::SuiteConfig;
use crate::error::LabError;
use crate::output::{csv_string, report_json, trajectory_csv, write_csv, write_curves, write_report};
use crate::report::{exit_status, DecayRow};

/// Seed used when neither a flag nor the environment provides one.
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const SEED_ENV: &str = "MMINF_SEED";

/// Exit status for invalid configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mminf-lab", version, about = "Φ-entropy inequalities for the M/M/∞ queue, checked numerically")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured suites and write the JSON report and CSV curves.
    Run {
        /// JSON suite configuration; the built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configuration's seed.
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        curves_dir: Option<PathBuf>,
        /// Print only the verdict line and failures.
        #[arg(long)]
        quiet: bool,
    },
    /// List the tags of a registry.
    List {
        registry: RegistryArg,
        #[arg(long)]
        json: bool,
    },
    /// Entropy of `P_t f` under the stationary law, with its exponential bound.
    Decay {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value = "P1", value_parser = parse_phi)]
        phi: PhiFamily,
        /// `f(k) = a + b k`.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Simulate the queue: one trajectory as CSV, or an empirical law.
    Simulate {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 5)]
        n0: u64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Poisson-to-Gaussian scaling, or the local OU check with `--ou`.
    Scaling {
        #[arg(long, default_value = "P1", value_parser = parse_phi)]
        phi: PhiFamily,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10u64, 100, 1000])]
        grid: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Shape::Tanh)]
        g: Shape,
        /// Offset (`a` for linear, `c` for tanh and exp).
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        c: f64,
        /// Slope, tanh amplitude, or exponential rate.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s: f64,
        #[arg(long)]
        ou: bool,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y: f64,
    },
    /// Lowest eigenvalues of the truncated symmetrised generator.
    Spectrum {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 300)]
        trunc: usize,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegistryArg {
    Identities,
    Inequalities,
    Phis,
}

impl From<RegistryArg> for Registry {
    fn from(r: RegistryArg) -> Self {
        match r {
            RegistryArg::Identities => Registry::Identities,
            RegistryArg::Inequalities => Registry::Inequalities,
            RegistryArg::Phis => Registry::Phis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Linear,
    Tanh,
    Exp,
}

impl Shape {
    pub fn function(self, c: f64, s: f64) -> TestFunction {
        match self {
            Shape::Linear => TestFunction::Linear { a: c, b: s },
            Shape::Tanh => TestFunction::Tanh { c, s },
            Shape::Exp => TestFunction::Exp { c, k: s },
        }
    }
}

/// `P1`, `P2`, `P3(α)`, `POWER_MIXTURE`, `NEG_LOG`, `NEG_XLOGNEGX`, `NEG_GAUSS_ISOP`.
pub fn parse_phi(s: &str) -> Result<PhiFamily, String> {
    let up = s.trim().to_ascii_uppercase();
    let family = match up.as_str() {
        "P1" => PhiFamily::P1,
        "P2" => PhiFamily::P2,
        "POWER_MIXTURE" => PhiFamily::PowerMixture,
        "NEG_LOG" => PhiFamily::NegLog,
        "NEG_XLOGNEGX" => PhiFamily::NegXlognegx,
        "NEG_GAUSS_ISOP" => PhiFamily::NegGaussIsop,
        other => {
            let alpha = other
                .strip_prefix("P3(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| format!("unknown Φ '{s}'"))?
                .parse::<f64>()
                .map_err(|e| format!("bad P3 exponent: {e}"))?;
            PhiFamily::P3 { alpha }
        }
    };
    PhiFunction::from_family(&family).map_err(|e| e.to_string())?;
    Ok(family)
}

fn print_json(value: &impl Serialize) -> Result<(), LabError> {
    println!("{}", serde_json::to_string_pretty(value).map_err(|e| LabError::Serialise(e.to_string()))?);
    Ok(())
}

#[derive(Serialize)]
struct EmpiricalSummary {
    paths: usize,
    seed: u64,
    mean: f64,
    exact_mean: f64,
    variance: f64,
    exact_variance: f64,
    tv_to_exact: f64,
}

#[derive(Serialize)]
struct SpectrumSummary {
    lambda: f64,
    mu: f64,
    truncation: usize,
    gap: f64,
    eigenvalues: Vec<f64>,
}

fn execute(cli: Cli) -> Result<i32, LabError> {
    match cli.command {
        Command::Run { config, seed, report, curves_dir, quiet } => {
            let mut cfg = match &config {
                Some(p) => SuiteConfig::load(p)?,
                None => SuiteConfig::with_seed(DEFAULT_SEED),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if report.is_some() {
                cfg.output.report = report;
            }
            if curves_dir.is_some() {
                cfg.output.curves_dir = curves_dir;
            }
            let out = crate::suite::run(&cfg)?;
            if !quiet {
                for line in out.report.summary_lines() {
                    println!("{line}");
                }
            } else {
                println!("{}", out.report.summary_lines().last().cloned().unwrap_or_default());
            }
            let failures = out.report.failures();
            if !failures.is_empty() {
                eprintln!("failures:");
                for f in failures {
                    eprintln!("  {f}");
                }
            }
            if let Some(p) = &cfg.output.report {
                write_report(p, &out.report, &out.timings)?;
            }
            if let Some(d) = &cfg.output.curves_dir {
                write_curves(d, &out.curves)?;
            }
            Ok(exit_status(&out.report))
        }
        Command::List { registry, json } => {
            let rows = entries(registry.into());
            if json {
                print_json(&rows)?;
            } else {
                let width = rows.iter().map(|e| e.tag.chars().count()).max().unwrap_or(0);
                for e in rows {
                    println!("{:<width$}  {:<20}  {}", e.tag, e.group, e.statement);
                }
            }
            Ok(0)
        }
        Command::Decay { lambda, mu, phi, a, b, t_max, steps, csv } => {
            let q = QueueParams::new(lambda, mu)?;
            let phi = PhiFunction::from_family(&phi)?;
            let len = 2 * DiscreteMeasure::poisson(q.finite_rho()?)?.len();
            let f = GridFunction::from_fn(len, phi.interval(), |k| a + b * k as f64)?;
            let steps = steps.max(1);
            let times: Vec<f64> = (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect();
            let rows: Vec<DecayRow> = entropy_decay_curve(&q, &phi, &f, &times)?
                .into_iter()
                .map(|p| DecayRow {
                    lambda,
                    mu,
                    phi: phi.family().to_string(),
                    function: format!("{a}+{b}k"),
                    t: p.t,
                    value: p.value,
                    bound: p.bound,
                })
                .collect();
            match csv {
                Some(p) => write_csv(&p, &rows)?,
                None => print!("{}", csv_string(&rows)?),
            }
            Ok(0)
        }
        Command::Simulate { lambda, mu, n0, t_max, seed, paths, csv } => {
            let q = QueueParams::new(lambda, mu)?;
            if paths <= 1 {
                let text = trajectory_csv(&simulate_path(&q, n0, t_max, seed)?)?;
                match csv {
                    Some(p) => std::fs::write(&p, text).map_err(|e| LabError::Io(p, e))?,
                    None => print!("{text}"),
                }
            } else {
                let emp = crate::parallel::empirical_law(&q, n0, t_max, paths, seed)?;
                let exact = mminf_core::queue::mehler_law(&q, t_max, n0 as usize)?;
                print_json(&EmpiricalSummary {
                    paths,
                    seed,
                    mean: emp.mean(),
                    exact_mean: exact.mean(),
                    variance: emp.variance(),
                    exact_variance: exact.variance(),
                    tv_to_exact: emp.tv_distance(&exact).value,
                })?;
            }
            Ok(0)
        }
        Command::Scaling { phi, rho, grid, g, c, s, ou, lambda, mu, t, y } => {
            let phi = PhiFunction::from_family(&phi)?;
            let g = g.function(c, s);
            if ou {
                print_json(&ou_local_check(&phi, &QueueParams::new(lambda, mu)?, y, t, &g, &grid)?)?;
            } else {
                print_json(&poisson_to_gauss(&phi, rho, &g, &grid)?)?;
            }
            Ok(0)
        }
        Command::Spectrum { lambda, mu, trunc, count } => {
            let q = QueueParams::new(lambda, mu)?;
            print_json(&SpectrumSummary {
                lambda,
                mu,
                truncation: trunc,
                gap: spectral_gap(&q, trunc)?,
                eigenvalues: spectrum(&q, trunc, count)?,
            })?;
            Ok(0)
        }
    }
}

/// Parses `std::env::args`, runs the command, and returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// The JSON a `run` would write for `config`, without touching the disk.
pub fn run_to_json(config: &SuiteConfig) -> Result<String, LabError> {
    report_json(&crate::suite::run(config)?.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_names_parse() {
        assert_eq!(parse_phi("p3(1.5)").unwrap(), PhiFamily::P3 { alpha: 1.5 });
        assert_eq!(parse_phi("NEG_LOG").unwrap(), PhiFamily::NegLog);
        assert!(parse_phi("P3(2.5)").is_err());
        assert!(parse_phi("P9").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
