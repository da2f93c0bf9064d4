use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deltalap_cli::{run, RunConfig, EXIT_CONFIG, EXIT_FAIL};

#[derive(Parser)]
#[command(name = "deltalap", about = "Experiments with the 2D point-interaction Laplacian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the version.
    Version,
}

fn load(path: &PathBuf) -> Result<RunConfig, u8> {
    RunConfig::load(path).map_err(|e| {
        eprintln!("{e}");
        EXIT_CONFIG as u8
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("deltalap {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(_) => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(code) => ExitCode::from(code),
        },
        Command::Run {
            config,
            output_dir,
            seed,
        } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return ExitCode::from(code),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let out = cfg.output_dir.clone();
            match run(&cfg, &out) {
                Ok((report, code)) => {
                    for name in report.failures() {
                        eprintln!("FAILED {name}");
                    }
                    println!("{}", out.join("report.json").display());
                    ExitCode::from(code as u8)
                }
                Err(e) => {
                    eprintln!("cannot write results: {e}");
                    ExitCode::from(EXIT_FAIL as u8)
                }
            }
        }
    }
}
