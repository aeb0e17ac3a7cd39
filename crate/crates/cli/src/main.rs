use std::path::PathBuf;
use std::process::ExitCode;

use adnovel_cli::config::Format;
use adnovel_cli::runner::render;
use adnovel_cli::{presets, runner, CliError, RunConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "adnovel", version, about = "Adiabatic NOVEL spin dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or explicit configuration
    Run(RunArgs),
    /// Evaluate the scan grid of a configuration
    Scan(RunArgs),
    /// Preset reference
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Check a configuration without running it
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Print every preset with its pinned parameters
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output file, stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides output.format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Overrides output.tol
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides output.n_steps
    #[arg(long)]
    steps: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            config.output.path = Some(out.clone());
        }
        if let Some(f) = self.format {
            config.output.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        if self.tol.is_some() {
            config.output.tol = self.tol;
        }
        if self.steps.is_some() {
            config.output.n_steps = self.steps;
        }
        config.validate()?;
        Ok(config)
    }
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output.path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let config = args.load()?;
            let table = runner::run(&config)?;
            emit(&config, &render(&table, config.output.format))
        }
        Command::Scan(args) => {
            let config = args.load()?;
            let table = runner::scan(&config)?;
            emit(&config, &render(&table, config.output.format))
        }
        Command::Presets {
            action: PresetAction::List,
        } => {
            print!("{}", presets::reference());
            Ok(())
        }
        Command::Validate { config } => {
            RunConfig::load(&config)?;
            println!("ok");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
