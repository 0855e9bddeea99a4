mod config;
mod error;
mod experiment;
mod stats;
mod synth;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_layer, Layer};
use crate::error::{read_file, CliResult};

#[derive(Parser, Debug)]
#[command(author, version, about = "Adaptive-weight linear SVM training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one model and evaluate it on a test file or a held-out split.
    #[command(after_long_help = config::describe_keys())]
    Train {
        #[command(flatten)]
        run: RunFlags,
    },
    /// Sweep datasets x methods x seeds from a manifest.
    #[command(after_long_help = experiment::MANIFEST_HELP)]
    Experiment {
        manifest: PathBuf,
        /// Comma-separated seeds, overriding the manifest.
        #[arg(long)]
        seeds: Option<String>,
        /// Comma-separated method names, overriding the manifest.
        #[arg(long)]
        methods: Option<String>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Rank statistics over a results CSV.
    Stats(stats::StatsArgs),
    /// Write a two-cloud synthetic dataset in LIBSVM format.
    Synth(synth::SynthArgs),
}

/// Flags shared by `train` and `experiment`; each maps to the configuration
/// key of the same name and takes precedence over a `--config` file.
#[derive(Args, Debug, Default)]
struct RunFlags {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    test_data: Option<String>,
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    adaptive: bool,
    #[arg(long)]
    weight_mode: Option<String>,
    #[arg(long)]
    noise_mode: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    alpha0: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    eps_h: Option<String>,
    #[arg(long)]
    outer_iters: Option<String>,
    #[arg(long)]
    inner_iters: Option<String>,
    #[arg(long)]
    batch_size: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, short)]
    verbose: bool,
}

impl RunFlags {
    fn layer(&self) -> Layer {
        let mut l = Layer::default();
        let pairs = [
            ("data", &self.data),
            ("test_data", &self.test_data),
            ("split", &self.split),
            ("preset", &self.preset),
            ("optimizer", &self.optimizer),
            ("weight_mode", &self.weight_mode),
            ("noise_mode", &self.noise_mode),
            ("sigma", &self.sigma),
            ("c", &self.c),
            ("alpha0", &self.alpha0),
            ("tau", &self.tau),
            ("mu", &self.mu),
            ("lambda", &self.lambda),
            ("eps_h", &self.eps_h),
            ("outer_iters", &self.outer_iters),
            ("inner_iters", &self.inner_iters),
            ("batch_size", &self.batch_size),
            ("seed", &self.seed),
            ("jobs", &self.jobs),
            ("out", &self.out),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                l.set(k, v.clone());
            }
        }
        if self.adaptive {
            l.set("adaptive", "true");
        }
        if self.verbose {
            l.set("verbose", "true");
        }
        l
    }

    /// Config file (if any) overlaid with the explicit flags.
    fn overrides(&self) -> CliResult<Layer> {
        let file = match &self.config {
            Some(path) => parse_layer(&read_file(path)?, &path.display().to_string(), &[])?,
            None => Layer::default(),
        };
        Ok(file.merged(&self.layer()))
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train { run } => train::run(&run.overrides()?),
        Command::Experiment {
            manifest,
            seeds,
            methods,
            run,
        } => experiment::run(&manifest, &run.overrides()?, seeds.as_deref(), methods.as_deref()),
        Command::Stats(args) => stats::run(&args),
        Command::Synth(args) => synth::run(&args),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
