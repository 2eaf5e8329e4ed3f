use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use sopkit_cli::config::ExperimentKind;

/// Reproducible experiment runner: every run is a pure function of its
/// config and seed, written out as delimited text plus a checksum manifest.
#[derive(Parser)]
#[command(name = "sopkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file: `key = value` lines under [section] headers
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed; overrides the config's [experiment] seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config's [experiment] out
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever experiment the config file names
    Run(Common),
    /// Secrecy-outage convex bound over an (intensity, correlation) grid
    SopTable(Common),
    /// Count pencil eigenvalues inside a circle
    CountEigs(Common),
    /// Tabulate the margin function and projected updates
    Project(Common),
    /// Random-subspace shrinkage tail frequency vs the analytic bound
    JlTail(Common),
    /// Two-time-scale actor-critic training trace and output policy
    Train(Common),
    /// Possibilistic two-mode semi-Markov trajectory
    Possim(Common),
    /// Greedy threshold search cost and quality ratio tables
    ComplexityTable(Common),
}

fn split(command: &Command) -> (Option<ExperimentKind>, &Common) {
    match command {
        Command::Run(c) => (None, c),
        Command::SopTable(c) => (Some(ExperimentKind::SopTable), c),
        Command::CountEigs(c) => (Some(ExperimentKind::CountEigs), c),
        Command::Project(c) => (Some(ExperimentKind::Project), c),
        Command::JlTail(c) => (Some(ExperimentKind::JlTail), c),
        Command::Train(c) => (Some(ExperimentKind::Train), c),
        Command::Possim(c) => (Some(ExperimentKind::Possim), c),
        Command::ComplexityTable(c) => (Some(ExperimentKind::ComplexityTable), c),
    }
}

fn main() {
    let cli = Cli::parse();
    let (kind, common) = split(&cli.command);
    if kind.is_none() && common.config.is_none() {
        eprintln!("config error: the run subcommand requires --config");
        std::process::exit(2);
    }
    match sopkit_cli::run_cli(kind, common.config.as_deref(), common.seed, common.out.clone()) {
        Ok(manifest) => {
            println!("config {}", manifest.config_hash);
            for (name, hash) in &manifest.outputs {
                println!("{name} {hash}");
            }
        }
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}
