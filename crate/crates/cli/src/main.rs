use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use displacemon_cli::{run, CliError, RunRequest, Subcommand, OUT_ENV};

/// Run a displacemon scenario and write its data artifacts.
#[derive(Debug, Parser)]
#[command(name = "displacemon", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Scenario file (TOML); defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set numerics.dim=128`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; otherwise output.directory, then $DISPLACEMON_OUT.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Print key scalars after the run.
    #[arg(long)]
    summary: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config_text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => return fail(&CliError::Io(format!("{}: {e}", path.display()))),
        },
        None => String::new(),
    };
    let request = RunRequest {
        subcommand: args.subcommand,
        config_text,
        overrides: args.overrides,
        out: args.out,
        env_out: std::env::var(OUT_ENV).ok(),
    };
    match run(&request) {
        Ok(outcome) => {
            if args.summary {
                for (key, value) in &outcome.summary {
                    println!("{key} = {value}");
                }
            }
            println!("manifest: {}", outcome.directory.join(displacemon_cli::MANIFEST).display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}
