use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semiquant::experiment::{load_config, run, RunOptions};

#[derive(Parser)]
#[command(version, about = "Run semiclassical quantization experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Parent directory for run directories (overrides `output_dir`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for sampled points and random states (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and reports.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment and write its run directory.
    Run { config: PathBuf },
    /// Check the config against its schema without running anything.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                println!("{}: valid {} config", config.display(), cfg.kind);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Run { config } => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build();
            let pool = match pool {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("cannot start worker pool: {e}");
                    return ExitCode::from(1);
                }
            };
            let opts = RunOptions { output_dir: cli.output_dir, seed: cli.seed };
            let result = pool.install(|| load_config(&config).and_then(|cfg| run(cfg, &opts)));
            match result {
                Ok(out) => {
                    println!("{}", out.dir.display());
                    for (k, v) in &out.summary {
                        println!("  {k} = {v:e}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
