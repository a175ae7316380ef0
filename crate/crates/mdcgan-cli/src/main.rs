//! Command-line front door: dataset generation, model training, and the
//! three benchmark studies, all emitting reproducible JSON + CSV
//! artifacts.

mod commands;
mod config;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use mdcgan::models::{DiscContract, GenLoss, SigmaA};

#[derive(Parser)]
#[command(
    name = "mdcgan",
    about = "Probabilistic time-series forecasting with a mixture-density conditional GAN",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Training hyperparameter overrides; every field of the training
/// configuration is reachable as a flag.
#[derive(Args, Debug, Clone, Default)]
struct TrainFlags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, help = "base layer width")]
    n: Option<usize>,
    #[arg(long)]
    z_dim: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    disc_steps: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    dropout_disc: Option<f64>,
    #[arg(long)]
    dropout_gen: Option<f64>,
    #[arg(long)]
    dropout_net: Option<f64>,
    #[arg(long)]
    leaky_slope: Option<f64>,
    #[arg(long, help = "likelihood scale: a number or \"data\"")]
    sigma_a: Option<SigmaA>,
    #[arg(long, value_enum)]
    gen_loss: Option<GenLossArg>,
    #[arg(long, value_enum)]
    disc_contract: Option<DiscContractArg>,
    #[arg(long)]
    coupled_generator: Option<bool>,
    #[arg(long)]
    sample_count: Option<usize>,
    #[arg(long)]
    stop_window: Option<usize>,
    #[arg(long)]
    stop_rel_tol: Option<f64>,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
enum GenLossArg {
    RawLikelihood,
    LogLikelihood,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
enum DiscContractArg {
    Learned,
    Literal,
}

impl TrainFlags {
    fn to_patch(&self) -> config::TrainPatch {
        config::TrainPatch {
            k: self.k,
            m: self.m,
            n: self.n,
            z_dim: self.z_dim,
            batch: self.batch,
            disc_steps: self.disc_steps,
            iterations: self.iterations,
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
            dropout_disc: self.dropout_disc,
            dropout_gen: self.dropout_gen,
            dropout_net: self.dropout_net,
            leaky_slope: self.leaky_slope,
            sigma_a: self.sigma_a,
            gen_loss: self.gen_loss.map(|g| match g {
                GenLossArg::RawLikelihood => GenLoss::RawLikelihood,
                GenLossArg::LogLikelihood => GenLoss::LogLikelihood,
            }),
            disc_contract: self.disc_contract.map(|d| match d {
                DiscContractArg::Learned => DiscContract::Learned,
                DiscContractArg::Literal => DiscContract::Literal,
            }),
            coupled_generator: self.coupled_generator,
            sample_count: self.sample_count,
            seed: self.seed,
            stop_window: self.stop_window,
            stop_rel_tol: self.stop_rel_tol,
        }
    }
}

/// Dataset selection for the experiment subcommands.
#[derive(Args, Debug, Clone)]
struct DatasetFlags {
    /// mackey-glass | gbm | two-regime | a CSV path
    #[arg(long)]
    dataset: Option<String>,
    /// CSV column (header name or index)
    #[arg(long)]
    column: Option<String>,
    /// Series length for the synthetic generators
    #[arg(long)]
    length: Option<usize>,
    /// Generator seed (gbm, two-regime)
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long)]
    drift: Option<f64>,
    #[arg(long)]
    vol: Option<f64>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    /// Skip the [0,1] normalization
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Args, Debug, Clone)]
struct ExperimentFlags {
    /// JSON configuration file; flags override its values
    #[arg(long)]
    config: Option<String>,
    /// Comma-separated model list (mdcgan,cgan,mdn,snn,ar0,ar5)
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Comma-separated noise fractions (e.g. 0,0.05,0.3)
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Score only the final step of each recursive path
    #[arg(long)]
    endpoint_only: bool,
    /// Comma-separated mixture orders for the m-study
    #[arg(long, value_delimiter = ',')]
    m_values: Option<Vec<usize>>,
    /// Comma-separated training seeds
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Posterior draws pooled per prediction
    #[arg(long)]
    samples: Option<usize>,
    /// Also compute density surfaces at this y-resolution
    #[arg(long)]
    density_resolution: Option<usize>,
    /// Worker threads (default: available cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (default: $MDCGAN_OUT or ./out)
    #[arg(long)]
    out: Option<String>,
    #[command(flatten)]
    train: TrainFlags,
    #[command(flatten)]
    dataset: DatasetFlags,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset CSV plus its manifest
    Generate {
        /// mackey-glass | gbm | two-regime
        generator: String,
        #[arg(long, default_value_t = 2405)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        drift: Option<f64>,
        #[arg(long)]
        vol: Option<f64>,
        #[arg(long)]
        out: Option<String>,
        /// Output file stem (default: the generator name)
        #[arg(long)]
        name: Option<String>,
    },
    /// Train one model on a CSV series and write a checkpoint
    Train {
        /// mdcgan | cgan | mdn | snn | ar
        #[arg(long)]
        model: String,
        /// Input CSV path
        #[arg(long)]
        data: String,
        /// CSV column (header name or index)
        #[arg(long, default_value = "0")]
        column: String,
        /// AR order (ar model only)
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        n_train: Option<usize>,
        #[arg(long)]
        n_test: Option<usize>,
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        train: TrainFlags,
    },
    /// Noise-robustness sweep: train once per seed, evaluate across
    /// test-noise levels
    Sweep(ExperimentFlags),
    /// Long-horizon study: recursive-forecast MSE ratios to the
    /// martingale baseline
    Horizon(ExperimentFlags),
    /// Mixture-order study: negative log-likelihood across m values
    Mstudy(ExperimentFlags),
    /// Pretty-print a results file; optionally export density grids
    Report {
        /// Path to a results JSON document
        results: String,
        #[arg(long, default_value = "table")]
        format: String,
        /// Directory to write density-grid CSVs into
        #[arg(long)]
        grid: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            generator,
            length,
            seed,
            drift,
            vol,
            out,
            name,
        } => commands::generate(&generator, length, seed, drift, vol, out, name),
        Command::Train {
            model,
            data,
            column,
            order,
            config,
            n_train,
            n_test,
            out,
            train,
        } => commands::train(
            &model,
            &data,
            &column,
            order,
            config.as_deref(),
            n_train,
            n_test,
            out,
            &train.to_patch(),
        ),
        Command::Sweep(flags) => {
            commands::experiment(mdcgan::experiments::ExperimentKind::NoiseSweep, &flags)
        }
        Command::Horizon(flags) => {
            commands::experiment(mdcgan::experiments::ExperimentKind::Horizon, &flags)
        }
        Command::Mstudy(flags) => {
            commands::experiment(mdcgan::experiments::ExperimentKind::MixtureOrder, &flags)
        }
        Command::Report {
            results,
            format,
            grid,
        } => commands::report(&results, &format, grid.as_deref()),
    }
}
