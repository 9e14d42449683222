use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uavnet::config::{strategy_name, StrategyName};
use uavnet::{find_optimum_height, load_with_overrides, oracle, run_sweep, write_csv, write_outputs};
use uavnet::{CliError, ConfigFile, Engine, SweepAxis};

#[derive(Parser)]
#[command(name = "uavnet", version, about = "Coverage of UAV networks serving user hotspots")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; omitted sections use the reference scenario.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set deployment.height_m=80`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage and spectral efficiency at the configured deployment.
    Coverage(ConfigArgs),
    /// Evaluate the configured sweep and write CSV plus a run manifest.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output CSV path, overriding `sweep.output`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Height that maximizes coverage for each configured strategy.
    Optimum(ConfigArgs),
    /// Monte-Carlo comparison of all placement strategies over the sweep.
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the oracle cross-checks of the analytic engine.
    Selftest,
}

fn load(args: &ConfigArgs) -> Result<ConfigFile, CliError> {
    let text = match &args.config {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?
        }
        None => String::new(),
    };
    load_with_overrides(&text, &args.overrides)
}

fn sweep(mut file: ConfigFile, output: Option<PathBuf>) -> Result<(), CliError> {
    if let Some(o) = output {
        file.sweep.output = o;
    }
    let cfg = file.resolve()?;
    let rows = run_sweep(&cfg)?;
    let manifest = write_outputs(&file, &rows, &cfg.output_path)?;
    eprintln!("wrote {} rows to {} ({})", rows.len(), cfg.output_path.display(), manifest.display());
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Coverage(args) => {
            let mut file = load(&args)?;
            file.sweep.axis = SweepAxis::Height;
            file.sweep.values = vec![file.deployment.height_m];
            let cfg = file.resolve()?;
            let rows = run_sweep(&cfg)?;
            write_csv(&rows, std::io::stdout().lock())?;
        }
        Command::Sweep { cfg, output } => sweep(load(&cfg)?, output)?,
        Command::Compare { cfg, output } => {
            let mut file = load(&cfg)?;
            file.sweep.engines = vec![Engine::MonteCarlo];
            file.sweep.strategies = vec![
                StrategyName::HotspotCenter,
                StrategyName::UniformPpp,
                StrategyName::RectGrid,
                StrategyName::Kmeans,
            ];
            sweep(file, output)?;
        }
        Command::Optimum(args) => {
            let mut file = load(&args)?;
            file.sweep.axis = SweepAxis::Height;
            let cfg = file.resolve()?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "strategy,engine,gamma_opt_m,coverage,flat").map_err(|e| CliError::io("stdout", e))?;
            for &s in &cfg.strategies {
                let opt = find_optimum_height(&cfg, s)?;
                if opt.flat {
                    eprintln!("warning: {} coverage profile is flat around its maximum", strategy_name(s));
                }
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    strategy_name(s),
                    opt.engine,
                    opt.gamma_opt,
                    opt.metric_at_opt,
                    opt.flat
                )
                .map_err(|e| CliError::io("stdout", e))?;
            }
        }
        Command::Selftest => {
            let checks = oracle::run_all();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
