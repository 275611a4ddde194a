use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kdp_cli::{describe_infeasible, parse_protocols, run, CliError, Command, Format, Scenario};

#[derive(Parser)]
#[command(name = "kdp", version, about = "Plan, sweep, simulate and audit key distribution protocols")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full parameter table for every protocol and key length
    Plan(Args),
    /// Key-rate curves
    Sweep(Args),
    /// Monte Carlo runs against the analytic bounds
    Simulate(Args),
    /// Exact leakage of the toy extraction instances
    Audit(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file (TOML); defaults are used when omitted
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding the scenario
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Comma-separated protocol names, overriding the scenario
    #[arg(long)]
    protocols: Option<String>,
}

fn load(args: &Args) -> Result<Scenario, CliError> {
    let mut s = match &args.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
            Scenario::parse(&text)?
        }
        None => Scenario::default(),
    };
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(list) = &args.protocols {
        s.protocols = parse_protocols(list)?;
    }
    Ok(s)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (cmd, args) = match &cli.command {
        Cmd::Plan(a) => (Command::Plan, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Audit(a) => (Command::Audit, a),
    };
    let s = load(args)?;
    let (text, infeasible) = run(cmd, &s, args.format)?;
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if infeasible.is_empty() {
        Ok(())
    } else {
        eprint!("{}", describe_infeasible(&infeasible));
        Err(CliError::Infeasible(format!("{} infeasible point(s)", infeasible.len())))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kdp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
