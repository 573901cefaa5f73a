mod config;
mod error;
mod evaluate;
mod import;
mod manifest;
mod preprocess;
mod report;
mod svg;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ppg2ecg::training::{GeneratorLoss, Objective};

use crate::config::{FileConfig, TrainOverrides};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;

#[derive(Debug, Parser)]
#[command(name = "ppg2ecg", version, about = "PPG to ECG translation: preprocessing, training and heart-rate evaluation")]
struct Cli {
    /// Random seed for training and splitting.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker processes for seed sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert raw dataset archives with the external `dalia-import` tool.
    Import(ImportArgs),
    /// Build the training and evaluation pair stores and the subject split.
    Preprocess(PreprocessArgs),
    /// Train one run, or one run per seed with --seeds.
    Train(TrainArgs),
    /// Write synthetic ECG for a pair store.
    Synthesize(SynthesizeArgs),
    /// Score heart rate from synthetic ECG against the real ECG.
    Evaluate(EvaluateArgs),
    /// Train one run per seed in parallel worker processes.
    Sweep(TrainArgs),
    /// Histograms and tables from evaluation and sweep reports.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    /// Per-subject archive; repeat for several.
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Root of the interchange-format corpus.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Seed for the subject split (defaults to --seed).
    #[arg(long)]
    pub split_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Directory written by `preprocess`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// `gan` or `gan_plus_freq`.
    #[arg(long)]
    pub objective: Option<Objective>,
    /// Seed list: `0..30`, `1,4,9` or a single value.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr_constant_epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr_g: Option<f64>,
    #[arg(long)]
    pub lr_d: Option<f64>,
    #[arg(long)]
    pub lambda_freq: Option<f64>,
    /// Use the saturating minimax generator loss.
    #[arg(long)]
    pub minimax: bool,
    /// Continue from the newest checkpoint in the output directory.
    #[arg(long)]
    pub resume: bool,
    /// Stop after this many epochs; the learning-rate schedule still spans the full run.
    #[arg(long)]
    pub stop_after: Option<usize>,
}

impl TrainArgs {
    fn overrides(&self) -> TrainOverrides {
        TrainOverrides {
            objective: self.objective,
            epochs: self.epochs,
            lr_constant_epochs: self.lr_constant_epochs,
            batch_size: self.batch_size,
            lr_g: self.lr_g,
            lr_d: self.lr_d,
            lambda_freq: self.lambda_freq,
            generator_loss: self.minimax.then_some(GeneratorLoss::Minimax),
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Pair store whose PPG is translated.
    #[arg(long)]
    pub pairs: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Generator checkpoint; repeat to score several.
    #[arg(long)]
    pub checkpoint: Vec<PathBuf>,
    /// Pair store of 10 s windows.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Also score the PPG peak-detector baseline.
    #[arg(long)]
    pub baseline: bool,
    /// Score the real ECG against itself instead of a generator.
    #[arg(long)]
    pub self_test: bool,
    /// Count failed windows as 100% error instead of excluding them.
    #[arg(long)]
    pub count_failures: bool,
    /// Label stored in the report (defaults to the checkpoint's objective).
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directories or files holding report.json / sweep.json.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

/// Settings shared by every command after merging flags over the file.
#[derive(Debug)]
pub struct Context {
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
    pub file: FileConfig,
}

impl Context {
    pub fn train_config(&self, flags: TrainOverrides) -> CliResult<ppg2ecg::training::TrainConfig> {
        let merged = self.file.train.clone().merge(flags);
        let mut c = merged.resolve()?;
        c.seed = self.seed;
        Ok(c)
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Import(_) => "import",
        Command::Preprocess(_) => "preprocess",
        Command::Train(_) => "train",
        Command::Synthesize(_) => "synthesize",
        Command::Evaluate(_) => "evaluate",
        Command::Sweep(_) => "sweep",
        Command::Report(_) => "report",
    }
}

fn context(cli: &Cli) -> CliResult<Context> {
    let file = config::load(cli.config.as_deref())?;
    let out = cli
        .out
        .clone()
        .or_else(|| file.out.clone())
        .ok_or_else(|| CliError::input("no output directory: pass --out or set \"out\" in the config file"))?;
    Ok(Context {
        seed: cli.seed.or(file.seed).or(file.train.seed).unwrap_or(0),
        jobs: cli.jobs.or(file.jobs).unwrap_or(1).max(1),
        out,
        file,
    })
}

fn run(cli: &Cli, ctx: &Context, rec: &mut Recorder) -> CliResult<()> {
    if let Some(c) = &cli.config {
        rec.input(c);
    }
    match &cli.command {
        Command::Import(a) => import::run(ctx, a, rec),
        Command::Preprocess(a) => preprocess::run(ctx, a, rec),
        Command::Train(a) => train::run(ctx, a, rec, false),
        Command::Sweep(a) => train::run(ctx, a, rec, true),
        Command::Synthesize(a) => evaluate::synthesize(ctx, a, rec),
        Command::Evaluate(a) => evaluate::run(ctx, a, rec),
        Command::Report(a) => report::run(ctx, a, rec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut rec = Recorder::new(command_name(&cli.command));
    let ctx = match context(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = run(&cli, &ctx, &mut rec);
    let (code, error) = match &result {
        Ok(()) => (0, None),
        Err(e) => (e.exit_code(), Some(e.to_string())),
    };
    if let Some(msg) = &error {
        eprintln!("error: {msg}");
    }
    if let Err(e) = manifest::append(&ctx.out, &rec.finish(&ctx.out, code, error)) {
        eprintln!("warning: could not append to the run manifest: {e}");
    }
    ExitCode::from(code as u8)
}
