use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use simbias::cli::{self, ExperimentConfig, Normalization, SweepConfig, FIT_FILE};
use simbias::estimator::{FitOptions, DEFAULT_SAMPLES};
use simbias::induction::RunScenario;
use simbias::map_engine::{BoundaryPolicy, MapParams};

#[derive(Parser)]
#[command(name = "simbias", version, about = "Simplicity bias in the random logistic map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one configuration and write dataset.csv, scale.json, run.json.
    Simulate {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        skip_transient: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the upper envelope and compute bias metrics for a dataset.
    Analyze {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        fit: Fit,
        /// Defaults to fit.json next to the dataset.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Cartesian product of the given parameter lists.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        mu: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        delta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        skip_transient: Vec<usize>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fit: Fit,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare Laplace and algorithmic-probability next-bit predictions.
    Induct {
        #[arg(long, group = "scenario")]
        explicit: Option<u128>,
        #[arg(long, group = "scenario")]
        power_tower: Option<u64>,
        #[arg(long, group = "scenario", requires_all = ["mu", "x0_log10"])]
        map_derived: bool,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x0_log10: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = MapParams::DEFAULT_LEN)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "clamp")]
    boundary: BoundaryPolicy,
    #[arg(long, default_value = "corpus")]
    norm: Normalization,
}

#[derive(Args)]
struct Fit {
    #[arg(long, default_value_t = 1.0)]
    bin_width: f64,
    #[arg(long)]
    exclude_singletons: bool,
}

impl From<&Fit> for FitOptions {
    fn from(f: &Fit) -> Self {
        FitOptions {
            bin_width: f.bin_width,
            exclude_singletons: f.exclude_singletons,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> simbias::Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            mu,
            eps,
            delta,
            skip_transient,
            common,
            out,
        } => {
            let params = MapParams::builder(mu, eps)
                .delta(delta)
                .len(common.n)
                .transient_skip(skip_transient)
                .boundary_policy(common.boundary)
                .build()?;
            let config = ExperimentConfig::new(params)
                .samples(common.samples)
                .seed(common.seed)
                .normalization(common.norm);
            let sim = cli::cmd_simulate(&config, &out)?;
            println!(
                "{} distinct patterns -> {}",
                sim.dataset.len(),
                sim.dataset_path.display()
            );
        }
        Command::Analyze { data, fit, out } => {
            let out = out.unwrap_or_else(|| data.with_file_name(FIT_FILE));
            let report = cli::cmd_analyze(&data, &FitOptions::from(&fit), &out)?;
            match (report.slope, &report.fit_error) {
                (Some(slope), _) => println!("slope {slope:.4} -> {}", out.display()),
                (None, Some(err)) => eprintln!("fit failed: {err}; metrics written to {}", out.display()),
                (None, None) => {}
            }
        }
        Command::Sweep {
            mu,
            eps,
            delta,
            skip_transient,
            common,
            fit,
            out,
        } => {
            let config = SweepConfig {
                mus: mu,
                epss: eps,
                deltas: delta,
                skips: skip_transient,
                n: common.n,
                boundary_policy: common.boundary,
                samples: common.samples,
                seed: common.seed,
                normalization: common.norm,
                fit: FitOptions::from(&fit),
            };
            let summary = cli::cmd_sweep(&config, &out, cli::worker_budget_from_env())?;
            println!("{} cells -> {}", summary.outcomes.len(), summary.summary_path.display());
            if summary.failures() > 0 {
                eprintln!("{} cell(s) failed", summary.failures());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Induct {
            explicit,
            power_tower,
            map_derived,
            mu,
            x0_log10,
            threshold,
            out,
        } => {
            let scenario = match (explicit, power_tower, map_derived) {
                (Some(n), None, false) => RunScenario::explicit(n),
                (None, Some(m), false) => RunScenario::power_tower(m),
                (None, None, true) => RunScenario::map_derived(
                    mu.expect("required by clap"),
                    x0_log10.expect("required by clap"),
                    threshold,
                ),
                _ => {
                    return Err(simbias::Error::Config(
                        "choose exactly one of --explicit, --power-tower, --map-derived".into(),
                    ))
                }
            };
            let report = cli::cmd_induct(&scenario, out.as_deref())?;
            if out.is_none() {
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
