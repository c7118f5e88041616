//! `mlqoc`: dataset generation, model training, and pulse optimization for a
//! simulated superconducting qubit.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mlqoc_cli::config::{load_config, LoadedConfig};
use mlqoc_cli::error::CliError;
use mlqoc_cli::run;

#[derive(Parser)]
#[command(name = "mlqoc", version, about = "Measurement-driven qubit characterization and control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every configured command.
#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration value, e.g. `--set data.n_pulses=1000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<LoadedConfig, CliError> {
        load_config(self.config.as_deref(), &self.set)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a measurement-record dataset on the simulated device.
    GenData {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output dataset file.
        #[arg(long)]
        out: PathBuf,
        /// Generate only shard INDEX of a sharded run.
        #[arg(long, requires = "shard_count")]
        shard_index: Option<usize>,
        /// Total number of shards.
        #[arg(long, requires = "shard_index")]
        shard_count: Option<usize>,
    },
    /// Merge dataset shards (in argument order) into one file.
    MergeShards {
        /// Output dataset file.
        #[arg(long)]
        out: PathBuf,
        /// Shard files in record order.
        #[arg(required = true)]
        shards: Vec<PathBuf>,
    },
    /// Train the characterization model on a dataset.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// Input dataset file.
        #[arg(long)]
        data: PathBuf,
        /// Directory for the model checkpoint and reports.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenData { config, out, shard_index, shard_count } => {
            let cfg = config.load()?;
            let shard = shard_index.zip(shard_count);
            run::gen_data::run(&cfg, &out, shard)
        }
        Command::MergeShards { out, shards } => run::gen_data::merge(&out, &shards),
        Command::Train { config, data, out_dir } => {
            let cfg = config.load()?;
            run::train_cmd::run(&cfg, &data, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
