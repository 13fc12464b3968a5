use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use nco::config::{ExperimentConfig, SEED_ENV};
use nco::experiment;
use nco::schedules::{classify_region, default_constants, validate_assumption4};
use nco::verification::{run_suite, Suite};
use nco::SimulationConfig;

#[derive(Parser)]
#[command(name = "nco", version, about = "Two-time-scale decentralized subgradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the file's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Run the config once per (mu, nu) pair.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        mu: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        nu: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Check a config's step sizes against the convergence conditions.
    ValidateSchedule {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
    },
    /// Classify (mu, nu, beta0) against the convergence region.
    ClassifyRegion {
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        beta0: f64,
    },
    /// Numerical checks of the supporting inequalities.
    CheckLemmas {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Continuations per window-contraction check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        quiet: bool,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<SimulationConfig> {
    let cfg = ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?;
    let env = std::env::var(SEED_ENV).ok();
    let seed = cfg.resolve_seed(seed, env.as_deref())?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(cfg.build(base, seed).with_context(|| format!("building {}", path.display()))?)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out, seed, quiet } => {
            let cfg = load(&config, seed)?;
            let summary = experiment::run_to_csv(&cfg, &out)?;
            if !quiet || !summary.ok() {
                print!("{summary}");
            }
            Ok(summary.ok())
        }
        Command::Sweep { config, out, mu, nu, seed, quiet } => {
            let cfg = load(&config, seed)?;
            let grid = experiment::grid(&mu, &nu);
            let cells = experiment::sweep(&cfg, &grid, &out)?;
            let mut ok = true;
            for c in &cells {
                if let Some(e) = &c.error {
                    ok = false;
                    eprintln!("mu={} nu={}: {e}", c.mu, c.nu);
                } else if !quiet {
                    println!(
                        "mu={:<6} nu={:<6} in_r1={:<5} final_delta={:.4e} final_dist={:.4e}",
                        c.mu, c.nu, c.in_r1, c.final_delta, c.final_dist
                    );
                }
            }
            Ok(ok)
        }
        Command::ValidateSchedule { config, c1, c2 } => {
            let cfg = load(&config, Some(0))?;
            if cfg.schedule.one_time_scale {
                bail!("one-time-scale schedules have beta = 1 and are not checked");
            }
            let lambda = cfg.graph.lambda()?;
            let (d1, d2) = default_constants(lambda);
            let report = validate_assumption4(&cfg.schedule, lambda, c1.unwrap_or(d1), c2.unwrap_or(d2))?;
            println!("{report}");
            println!();
            for (k, v) in report.key_values() {
                println!("{k}={v}");
            }
            Ok(true)
        }
        Command::ClassifyRegion { mu, nu, beta0 } => {
            println!("{}", classify_region(mu, nu, beta0));
            Ok(true)
        }
        Command::CheckLemmas { suite, seed, trials, quiet } => {
            let suite: Suite = suite.parse()?;
            let reports = run_suite(suite, seed, trials)?;
            let mut ok = true;
            for r in &reports {
                ok &= r.pass;
                if !quiet || !r.pass {
                    println!("{r}");
                }
            }
            Ok(ok)
        }
    }
}
