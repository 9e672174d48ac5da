use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use imres_cli::{execute, CliError, RunConfig, OUTPUT_DIR_ENV, SCENARIOS};

#[derive(Debug, Parser)]
#[command(name = "imres", version, about = "Fisher-information resolution limits of imaging setups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the analysis described by a JSON config and write a CSV table.
    Run {
        config: PathBuf,
        /// Output CSV (default: `<config stem>.csv` in $IMRES_OUTPUT_DIR or the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweeps.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the available scenarios.
    ListScenarios,
}

fn run(config_path: &Path, out: Option<&Path>, threads: Option<usize>) -> Result<(), CliError> {
    let config = RunConfig::from_path(config_path)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config {
                field: "--threads".into(),
                reason: "must be at least 1".into(),
            });
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let outcome = pool.install(|| execute(&config))?;

    let default_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let path = config.output_path(config_path, out, default_dir.as_deref());
    let echo = serde_json::to_string(&config).expect("config serializes");
    let comments = [
        format!("imres {}", env!("CARGO_PKG_VERSION")),
        format!("config: {echo}"),
    ];
    outcome.table.write(&path, &comments)?;
    let mut summary = format!("{} out={}", outcome.summary, path.display());
    if config.output.reference && !outcome.reference.rows.is_empty() {
        let reference_path = path.with_extension("reference.csv");
        outcome.reference.write(&reference_path, &comments)?;
        summary.push_str(&format!(" reference={}", reference_path.display()));
    }
    println!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out, threads } => run(config, out.as_deref(), *threads),
        Command::Validate { config } => RunConfig::from_path(config).map(|c| {
            println!("ok: {} {}", c.scenario.name(), c.analysis.name());
        }),
        Command::ListScenarios => {
            for (name, about) in SCENARIOS {
                println!("{name:<14}{about}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imres: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
