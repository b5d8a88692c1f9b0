use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mixgan::commands::{self, exit_code};
use mixgan::config::RunConfig;
use mixgan::data::BenchmarkConfig;
use mixgan::eval::ExperimentKind;
use mixgan::{Error, Result};

#[derive(Parser)]
#[command(name = "mixgan", version, about = "Mixup adversarial autoencoder experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Gaussian-cluster benchmark as a feature CSV.
    Benchmark {
        #[arg(long)]
        out: PathBuf,
        /// TOML file with benchmark fields; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_per_class: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        corpus: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// Train the model on the config's data and write a checkpoint.
    Train {
        config: PathBuf,
        #[arg(long)]
        run_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write synthetic features G(E(x)) for a feature CSV.
    Generate(Inference),
    /// Write latent codes E(x) for a feature CSV.
    Encode(Inference),
    /// Run the configured experiment and write reports.
    Evaluate {
        config: PathBuf,
        #[arg(long)]
        run_dir: Option<PathBuf>,
        /// Comma-separated seed list overriding `seeds`.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
    },
    /// Print a saved report.
    Report {
        report: PathBuf,
        #[arg(long, value_enum, default_value = "summary")]
        format: Format,
    },
}

#[derive(clap::Args)]
struct Inference {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Normaliser JSON written by `train`.
    #[arg(long)]
    normalizer: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Within,
    Encoded,
    Cross,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Summary,
    Json,
    Csv,
    Confusion,
}

fn run_dir(cfg: &RunConfig, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| commands::default_run_dir(cfg))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Benchmark {
            out,
            config,
            seed,
            n_per_class,
            dim,
            corpus,
            force,
        } => {
            let mut cfg: BenchmarkConfig = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
                }
                None => BenchmarkConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.n_per_class = n_per_class.unwrap_or(cfg.n_per_class);
            cfg.dim = dim.unwrap_or(cfg.dim);
            cfg.corpus = corpus.unwrap_or(cfg.corpus);
            let data = commands::cmd_benchmark(&cfg, &out, force)?;
            println!("wrote {} rows x {} features to {}", data.len(), data.dim(), out.display());
        }
        Command::Train { config, run_dir: dir, seed } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.train.seed = s;
            }
            let dir = run_dir(&cfg, dir);
            let out = commands::cmd_train(&cfg, &dir)?;
            println!("checkpoint {}", out.checkpoint.display());
            println!("log {}", out.train_log.display());
        }
        Command::Generate(a) => {
            let data = commands::cmd_generate(&a.checkpoint, &a.data, &a.out, a.normalizer.as_deref(), a.force)?;
            println!("wrote {} synthetic rows to {}", data.len(), a.out.display());
        }
        Command::Encode(a) => {
            let data = commands::cmd_encode(&a.checkpoint, &a.data, &a.out, a.normalizer.as_deref(), a.force)?;
            println!("wrote {} codes of width {} to {}", data.len(), data.dim(), a.out.display());
        }
        Command::Evaluate {
            config,
            run_dir: dir,
            seeds,
            experiment,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seeds {
                cfg.seeds = s;
            }
            if let Some(e) = experiment {
                cfg.experiment = match e {
                    Experiment::Within => ExperimentKind::Within,
                    Experiment::Encoded => ExperimentKind::Encoded,
                    Experiment::Cross => ExperimentKind::Cross,
                };
            }
            let dir = run_dir(&cfg, dir);
            let report = commands::cmd_evaluate(&cfg, &dir)?;
            print!("{}", report.summary());
            println!("reports in {}", dir.display());
        }
        Command::Report { report, format } => print_report(&report, format)?,
    }
    Ok(())
}

fn print_report(path: &Path, format: Format) -> Result<()> {
    let report = commands::cmd_report(path)?;
    let stdout = std::io::stdout();
    match format {
        Format::Summary => print!("{}", report.summary()),
        Format::Json => println!("{}", report.to_json()?),
        Format::Csv => report.write_csv(stdout.lock())?,
        Format::Confusion => report
            .write_confusion_csv(stdout.lock())
            .map_err(|e| Error::Data(e.to_string()))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
