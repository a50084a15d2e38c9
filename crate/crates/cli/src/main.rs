mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orlicz::{CoefficientLaw, NormOptions, YoungSpec};

use crate::config::{Expect, ExtrapolateCase, RunConfig};
use crate::output::Outcome;

/// A problem with the command line or the config; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

const WORKERS_ENV: &str = "ORLICZ_WORKERS";

#[derive(Parser)]
#[command(name = "orlicz", version, about = "Numerical checks for Orlicz and Besov-Orlicz norms on the torus")]
struct Cli {
    /// Directory for report files.
    #[arg(long, global = true, default_value = "orlicz-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg norms of sequences and trigonometric polynomials.
    LuxemburgNorm(ConfigArg),
    /// Classical and dyadic Besov-Orlicz norms and their comparison.
    BesovNorm(ConfigArg),
    /// Boundedness of the integral embedding condition over an s-grid.
    CheckConditions(ConfigArg),
    /// Sampling inequality on the frame of a given level.
    VerifySampling(SamplingArgs),
    /// Ball symmetric-difference bound and the supermultiplicativity transfer.
    CheckLemmas(ConfigArg),
    /// Admissible exponents and the summing criterion for an endpoint profile.
    Extrapolate(ExtrapolateArgs),
    /// Collects every summary in the output directory into one report.
    Report,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML or JSON run config.
    config: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    Gaussian,
    Unimodular,
}

#[derive(Args)]
struct SamplingArgs {
    /// Frame level n.
    #[arg(long)]
    level: u32,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Young function config `{kind, params}`; defaults to the three-branch
    /// example with α = 0.05.
    #[arg(long)]
    phi: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    /// Supermultiplicativity constant C (default known for power and
    /// three-branch functions).
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long, value_enum, default_value = "gaussian")]
    law: Law,
    /// Grid doublings of the norm convergence check.
    #[arg(long, default_value_t = 2)]
    max_doublings: usize,
}

#[derive(Args)]
struct ExtrapolateArgs {
    /// Config with `[[extrapolate]]` cases; otherwise use the flags.
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "config", requires_all = ["k", "p", "alpha"])]
    d: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Expected outcome: pass (convergent) or divergent.
    #[arg(long, value_parser = ["pass", "divergent"], default_value = "pass")]
    expect: String,
}

fn workers(cfg: Option<&RunConfig>) -> Result<Option<usize>, UsageError> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(UsageError(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        };
    }
    Ok(cfg.and_then(|c| c.workers))
}

fn init_pool(n: Option<usize>) {
    if let Some(n) = n {
        // only fails if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_config(path: &Path) -> Result<RunConfig, UsageError> {
    let cfg = config::load(path)?;
    if cfg.is_empty() {
        return Err(UsageError(format!("{}: config has no cases", path.display())));
    }
    init_pool(workers(Some(&cfg))?);
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    let start = Instant::now();
    let (name, outcome): (&str, Outcome) = match &cli.command {
        Command::LuxemburgNorm(a) => ("luxemburg-norm", commands::luxemburg(&load_config(&a.config)?)?),
        Command::BesovNorm(a) => ("besov-norm", commands::besov(&load_config(&a.config)?)?),
        Command::CheckConditions(a) => ("check-conditions", commands::conditions(&load_config(&a.config)?)?),
        Command::CheckLemmas(a) => ("check-lemmas", commands::lemmas(&load_config(&a.config)?)?),
        Command::VerifySampling(a) => {
            init_pool(workers(None)?);
            let phi = match &a.phi {
                Some(p) => config::load_young(p)?,
                None => YoungSpec::Section7 { alpha: 0.05 },
            };
            let req = commands::SamplingRequest {
                phi,
                constant: a.constant,
                level: a.level,
                trials: a.trials,
                seed: a.seed,
                law: match a.law {
                    Law::Gaussian => CoefficientLaw::Gaussian,
                    Law::Unimodular => CoefficientLaw::Unimodular,
                },
                norm: NormOptions { max_doublings: a.max_doublings, ..NormOptions::default() },
            };
            ("verify-sampling", commands::sampling(&req)?)
        }
        Command::Extrapolate(a) => {
            let cases = match (&a.config, a.d, a.k, a.p, a.alpha) {
                (Some(path), ..) => load_config(path)?.extrapolate,
                (None, Some(d), Some(k), Some(p), Some(alpha)) => {
                    init_pool(workers(None)?);
                    let expect = if a.expect == "divergent" { Expect::Divergent } else { Expect::Pass };
                    vec![ExtrapolateCase {
                        id: format!("d{d}-k{k}-p{p}-alpha{alpha}"),
                        d: Some(d),
                        k: Some(k),
                        p: Some(p),
                        profile: None,
                        alpha,
                        expect,
                    }]
                }
                _ => return Err(UsageError("give a config or all of --d --k --p --alpha".into())),
            };
            ("extrapolate", commands::extrapolate(&cases)?)
        }
        Command::Report => return commands::report(&cli.out),
    };
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let summary = output::write_outcome(&cli.out, name, &outcome, total_ms).map_err(UsageError)?;
    println!("{}", serde_json::to_string(&summary).expect("json"));
    Ok(outcome.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
