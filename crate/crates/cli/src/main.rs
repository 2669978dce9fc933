use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qb_cli::output::Report;
use qb_cli::{commands, CliError, Config};

#[derive(Parser)]
#[command(name = "qb", version, about = "Qutrit battery discharge, recharge and cost scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML scenario file; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; overrides `out` from the config. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force RK4 even where a closed form exists.
    #[arg(long)]
    numeric: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Accepted for interface stability; every command is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Free decay of a charged battery.
    Discharge(Common),
    /// One recharge trajectory.
    Recharge(Common),
    /// Final ergotropy across a parameter range.
    Sweep(Common),
    /// Drive cost, measurement cost and efficiency as JSON.
    Cost(Common),
    /// STA against STIRAP for the same pulse.
    Compare(Common),
}

type Runner = fn(&Config, bool) -> Result<Report, CliError>;

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let (name, common, f): (&str, Common, Runner) = match cli.command {
        Command::Discharge(c) => ("discharge", c, commands::discharge),
        Command::Recharge(c) => ("recharge", c, commands::recharge),
        Command::Sweep(c) => ("sweep", c, commands::sweep),
        Command::Cost(c) => ("cost", c, commands::cost),
        Command::Compare(c) => ("compare", c, commands::compare),
    };
    let cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.ensure_command(name)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let report = pool.install(|| f(&cfg, common.numeric))?;

    match common.out.or(cfg.out) {
        Some(path) => {
            std::fs::write(&path, &report.text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        }
        None => print!("{}", report.text),
    }
    Ok(report.warnings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qb: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
