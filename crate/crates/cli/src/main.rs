use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, error::ErrorKind};
use trp_cli::error::{EXIT_OK, EXIT_USAGE};
use trp_cli::record::{resolve_output, OUTPUT_DIR_ENV};
use trp_cli::{commands, load, CliError, Command, Context, RecordWriter};
use trp_core::par;
use trp_core::Execution;

/// Simulate and optimize twisted-rapid-passage quantum gates.
#[derive(Debug, Parser)]
#[command(name = "trp", version)]
struct Args {
    /// simulate | optimize | scan | converge | report
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in configuration, e.g. table1-hadamard.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Override a config value, e.g. `--set sweep.lambda=5.9`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Worker threads (default: one per processor).
    #[arg(long)]
    workers: Option<usize>,
    /// Optimizer seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output JSONL file (default from the config, under $TRP_OUTPUT_DIR if set).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Records to summarize (report only).
    #[arg(long)]
    records: Option<PathBuf>,
    /// Re-run every record and compare Tr P (report only).
    #[arg(long)]
    verify: bool,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

fn execute(args: Args) -> Result<(), CliError> {
    if args.command == Command::Report {
        let path = args
            .records
            .or(args.config)
            .ok_or_else(|| CliError::Usage("report needs --records <path>".into()))?;
        let out = commands::report(&path, args.verify)?;
        print!("{}", out.text);
        return Ok(());
    }
    let cfg = load(args.config.as_deref(), args.preset.as_deref(), &args.sets)?;
    if let Some(c) = cfg.command {
        if c != args.command {
            log::info!("config names command `{}`, running `{}`", c.as_str(), args.command.as_str());
        }
    }
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let ctx = Context {
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        seed: args.seed,
    };
    let command = args.command;
    let outcome = par::with_workers(args.workers, || commands::run(command, &cfg, &ctx))?;
    print!("{}", outcome.text);
    if !outcome.records.is_empty() {
        let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
        let path = resolve_output(args.out.as_deref(), &cfg, command, env_dir.as_deref());
        let writer = RecordWriter::new(path);
        writer.append(&outcome.records)?;
        eprintln!("wrote {} record(s) to {}", outcome.records.len(), writer.path().display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK as u8),
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
