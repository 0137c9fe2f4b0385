use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use msad::config::{parse_config_with_preset, ExperimentConfig, Preset};
use msad::experiment::{run_experiment, run_sweep, DEFAULT_SWEEP_WINDOW};
use msad::{Error, TopologyKind};

#[derive(Parser)]
#[command(
    name = "msad",
    version,
    about = "Multi-scale asset distribution simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write per-step metrics as CSV.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output path; overrides `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean profit for every beta and topology, written as CSV.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated betas [default: 0,0.6,0.7,0.8,0.9,1,1.1]
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        /// Comma-separated topology names [default: all six]
        #[arg(long, value_delimiter = ',')]
        topologies: Option<Vec<TopologyKind>>,
        /// Number of leading steps averaged per cell.
        #[arg(long, default_value_t = DEFAULT_SWEEP_WINDOW)]
        window: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the fully expanded config.
    Config {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
struct Source {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fill unspecified fields from a named preset.
    #[arg(long, value_parser = ["paper"])]
    preset: Option<String>,
    #[arg(long)]
    topology: Option<TopologyKind>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let preset = self.preset.as_ref().map(|_| Preset::Paper);
        let text = match &self.config {
            Some(path) => read(path)?,
            None if preset.is_some() => String::new(),
            None => {
                return Err(Error::Config {
                    field: "--config".into(),
                    message: "either --config <path> or --preset paper is required".into(),
                })
            }
        };
        let mut config = parse_config_with_preset(&text, preset)?;
        if let Some(t) = self.topology {
            config = config.with_topology(t);
        }
        if let Some(b) = self.beta {
            config = config.with_beta(b);
        }
        if let Some(a) = self.alpha {
            config.params.alpha = a;
        }
        config.validate()?;
        Ok(config)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { source, out } => {
            let mut config = source.load()?;
            if let Some(out) = out {
                config.output_path = out;
            }
            let result = run_experiment(&config)?;
            let window = config.total_steps.min(DEFAULT_SWEEP_WINDOW);
            eprintln!(
                "{} steps of {} (beta {}): mean profit {:.3} over the first {window} steps, wrote {}",
                result.rows.len(),
                config.topology,
                config.params.beta,
                result.mean_profit(0, window)?,
                config.output_path.display()
            );
        }
        Command::Sweep {
            source,
            betas,
            topologies,
            window,
            out,
        } => {
            let base = source.load()?;
            let betas = betas.unwrap_or_else(|| vec![0.0, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1]);
            let topologies = topologies.unwrap_or_else(|| TopologyKind::ALL.to_vec());
            let table = run_sweep(&topologies, &betas, &base, window)?;
            table.write_csv_file(&out)?;
            table.write_csv(std::io::stderr())?;
        }
        Command::Config { source } => print!("{}", source.load()?.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
