use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use exptest_cli::{parse_config_unvalidated, run_scenario, CliError, Mode, RunOptions, ScenarioKind, EXIT_UNCERTIFIED};

/// Run one exptest scenario from a TOML config.
#[derive(Debug, Parser)]
#[command(name = "exptest", version)]
struct Args {
    /// Scenario to run; must match the config's section.
    #[arg(value_enum)]
    scenario: ScenarioKind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config; default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for Monte Carlo runs (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Number mode (overrides `mode` in the config).
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|source| CliError::Io { path: args.config.display().to_string(), source })?;
    let mut config = parse_config_unvalidated(&text)?;
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    let kind = config.kind()?;
    if kind != args.scenario {
        return Err(CliError::config(
            "scenario",
            format!("config describes `{}`, not `{}`", kind.name(), args.scenario.name()),
        ));
    }
    config.validate()?;
    let out = args.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let base_dir = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let manifest = run_scenario(&config, &RunOptions { out, base_dir, quiet: args.quiet })?;
    Ok(if manifest.success { 0 } else { EXIT_UNCERTIFIED })
}
