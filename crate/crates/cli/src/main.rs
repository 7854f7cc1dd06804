use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fluxqmc_cli::{config, execute, CliError, Overrides, Pipeline};

#[derive(Parser)]
#[command(name = "fluxqmc", version, about = "Flux-qubit ED, projection and path-integral Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline named in the config.
    Run(RunArgs),
    /// Check a config and print the resolved experiment.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the config's [sweep] section regardless of its pipeline.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Independent chains per Monte Carlo point.
    #[arg(long)]
    chains: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: RunArgs, pipeline: Option<Pipeline>) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(vec![format!("--threads: {e}")]))?;
    }
    let overrides = Overrides {
        seed: args.seed,
        output_dir: args.out,
        n_chains: args.chains,
        pipeline,
    };
    let exp = config::load(&args.config, &overrides)?;
    let dir = execute(&exp)?;
    println!("{}: wrote {}", exp.pipeline, dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a, None),
        Command::Sweep(a) => run(a, Some(Pipeline::ConvergenceSweep)),
        Command::Validate { config } => config::load(&config, &Overrides::default()).map(|exp| {
            println!("{}", serde_json::to_string_pretty(&exp).expect("serializable"));
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
