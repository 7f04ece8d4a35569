use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hardy_core::space::set_default_n_cap;
use hardy_op::{run, sweep, Options, RunConfig};

#[derive(Parser)]
#[command(name = "hardy-op", version, about = "Classify weighted composition operators on weighted Hardy spaces")]
struct Cli {
    /// Output directory for reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for the randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify each configured operator.
    Run { config: PathBuf },
    /// Classify every point of the configured parameter sweep.
    Sweep { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var("HARDYOP_NCAP") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => set_default_n_cap(n),
            _ => {
                eprintln!("error: HARDYOP_NCAP must be a positive integer, got `{v}`");
                return ExitCode::from(1);
            }
        }
    }
    let opts = Options {
        out: cli.out,
        seed: cli.seed,
        jobs: cli.jobs,
    };
    let (path, is_sweep) = match cli.command {
        Command::Run { config } => (config, false),
        Command::Sweep { config } => (config, true),
    };
    let result = RunConfig::from_path(&path).map_err(Into::into).and_then(|cfg| {
        if is_sweep {
            sweep(cfg, &opts)
        } else {
            run(cfg, &opts)
        }
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", opts.out.join(f).display());
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
