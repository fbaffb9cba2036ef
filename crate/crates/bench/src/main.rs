use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbench_bench::{
    cem_train, emit_report, env_methods, evaluate_policy, reference_method, run_benchmark, write_report, BenchError,
    CemOptions, ReportFormat,
};
use orbench_core::{EnvConfig, ENV_IDS};

#[derive(Parser)]
#[command(name = "orbench", version, about = "Run operations-research environment benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate methods on a shared set of seeded episodes.
    Run {
        #[arg(long)]
        env: String,
        /// Comma-separated method ids; defaults to every method for the env.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Environment override `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Train a linear policy with the cross-entropy method.
    TrainCem {
        #[arg(long)]
        env: String,
        #[arg(long, default_value_t = 50)]
        iterations: usize,
        #[arg(long, default_value_t = 64)]
        population: usize,
        #[arg(long, default_value_t = 0.2)]
        elite_fraction: f64,
        /// Episodes per candidate evaluation.
        #[arg(long, default_value_t = 4)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV learning curve `iteration,elite_mean`; printed when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List environments and their methods.
    List,
}

fn env_config(overrides: &[String]) -> Result<EnvConfig, BenchError> {
    let mut cfg = EnvConfig::new();
    for kv in overrides {
        cfg.apply_assignment(kv)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::List => {
            for id in ENV_IDS {
                let methods = env_methods(id)?;
                println!("{id}: {} (reference {})", methods.join(", "), reference_method(id)?);
            }
        }
        Command::Run { env, methods, episodes, seed, out, format, overrides } => {
            let format: ReportFormat = format.parse()?;
            let cfg = env_config(&overrides)?;
            let methods = if methods.is_empty() {
                env_methods(&env)?.iter().map(|m| m.to_string()).collect()
            } else {
                methods
            };
            let run = run_benchmark(&env, &cfg, &methods, episodes, seed)?;
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            match out {
                Some(path) => {
                    emit_report(&run.report, format, &path)?;
                    eprintln!("wrote {} rows to {}", run.report.rows.len(), path.display());
                }
                None => write_report(&run.report, format, std::io::stdout().lock())?,
            }
        }
        Command::TrainCem { env, iterations, population, elite_fraction, episodes, seed, out, overrides } => {
            let cfg = env_config(&overrides)?;
            let opts = CemOptions { iterations, population, elite_fraction, episodes, seed, ..CemOptions::default() };
            let result = cem_train(&env, &cfg, &opts)?;
            let before = evaluate_policy(&env, &cfg, &result.initial, &result.eval_seeds)?;
            let after = evaluate_policy(&env, &cfg, &result.policy, &result.eval_seeds)?;
            eprintln!("mean episode reward: initial {before:.4}, trained {after:.4}");
            let mut text = String::from("iteration,elite_mean\n");
            for (i, v) in result.curve.iter().enumerate() {
                text.push_str(&format!("{i},{v}\n"));
            }
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ BenchError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
