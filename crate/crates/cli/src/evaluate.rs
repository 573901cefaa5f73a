use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use ppg2ecg::dataset::{load_pairs, save_pairs, SegmentPair};
use ppg2ecg::eval::{evaluate, evaluate_self, EvalReport, FailurePolicy, Subset, EVAL_BATCH};
use ppg2ecg::model::{Checkpoint, Generator, Tensor};
use ppg2ecg::training::{checkpoint_config, load_generator, TrainConfig};

use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{Context, EvaluateArgs, SynthesizeArgs};

pub const SYNTHETIC_PAIRS: &str = "synthetic.pairs";

/// The configuration a checkpoint is expected to match: the `--config`
/// file when one was given, otherwise the `config.json` of the run the
/// checkpoint belongs to.
fn expected_config(ctx: &Context, checkpoint: &Path) -> CliResult<Option<TrainConfig>> {
    if ctx.file.train.generator.is_some() || ctx.file.train.discriminator.is_some() {
        return Ok(Some(ctx.train_config(Default::default())?));
    }
    let run_config = checkpoint.parent().and_then(Path::parent).map(|d| d.join("config.json"));
    match run_config.filter(|p| p.is_file()) {
        Some(p) => {
            let bytes = fs::read(&p).map_err(|e| CliError::io(&p, e))?;
            let c = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            Ok(Some(c))
        }
        None => Ok(None),
    }
}

struct LoadedGenerator {
    config: TrainConfig,
    generator: Generator,
    params: ppg2ecg::model::ParameterSet,
}

fn load(ctx: &Context, path: &Path, rec: &mut Recorder) -> CliResult<LoadedGenerator> {
    rec.input(path);
    let expected = expected_config(ctx, path)?.map(|c| c.fingerprint());
    let ckpt = Checkpoint::load(path, expected.as_deref())?;
    let config = checkpoint_config(&ckpt)?;
    let params = load_generator(path, &config.generator, Some(&ckpt.fingerprint))?;
    rec.fingerprint = Some(ckpt.fingerprint);
    Ok(LoadedGenerator { generator: Generator::new(config.generator.clone())?, config, params })
}

fn read_pairs(path: &Path, rec: &mut Recorder) -> CliResult<Vec<SegmentPair>> {
    rec.input(path);
    let pairs = load_pairs(path)?;
    if pairs.is_empty() {
        return Err(CliError::input(format!("{} holds no pairs", path.display())));
    }
    Ok(pairs)
}

pub fn synthesize(ctx: &Context, args: &SynthesizeArgs, rec: &mut Recorder) -> CliResult<()> {
    let g = load(ctx, &args.checkpoint, rec)?;
    let mut pairs = read_pairs(&args.pairs, rec)?;
    for chunk in pairs.chunks_mut(EVAL_BATCH) {
        let x = Tensor::from_signals(chunk.iter().map(|p| p.ppg.samples.as_slice()))?;
        let y = g.generator.forward(&g.params, &x)?;
        for (i, pair) in chunk.iter_mut().enumerate() {
            pair.ecg.samples = y.signal(i).to_vec();
        }
    }
    fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    save_pairs(ctx.out.join(SYNTHETIC_PAIRS), &pairs)?;
    println!("{} synthetic windows written to {}", pairs.len(), ctx.out.join(SYNTHETIC_PAIRS).display());
    Ok(())
}

/// `<run>/checkpoints/epoch_N.ckpt` becomes `<run>_epoch_N`.
fn report_name(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let run = path
        .parent()
        .filter(|p| p.file_name().is_some_and(|n| n == "checkpoints"))
        .and_then(Path::parent)
        .and_then(Path::file_name)
        .map(|n| n.to_string_lossy().into_owned());
    match run {
        Some(r) => format!("{r}_{stem}"),
        None => stem,
    }
}

fn print_summary(name: &str, report: &EvalReport) {
    let cell = |s| report.mape(s).map_or("n/a".to_string(), |m| format!("{m:.2}%"));
    println!(
        "{name}: MAPE all {} / not active {} / active {}; {} failed windows, {} real-ECG failures",
        cell(Subset::All),
        cell(Subset::NotActive),
        cell(Subset::Active),
        report.failures,
        report.real_failures
    );
}

pub fn run(ctx: &Context, args: &EvaluateArgs, rec: &mut Recorder) -> CliResult<()> {
    if args.self_test == !args.checkpoint.is_empty() {
        return Err(CliError::input("give either --self-test or at least one --checkpoint"));
    }
    let pairs = read_pairs(&args.pairs, rec)?;
    let baseline = args.baseline || ctx.file.baseline.unwrap_or(false);
    let policy = if args.count_failures {
        FailurePolicy::CountAsFullError
    } else {
        ctx.file.policy.unwrap_or_default()
    };

    if args.self_test {
        let records = evaluate_self(&pairs, baseline);
        let mut report = EvalReport::build(&records, policy, baseline);
        report.label = Some(args.label.clone().unwrap_or_else(|| "self_test".into()));
        report.write(&ctx.out, &records)?;
        print_summary("self-test", &report);
        return Ok(());
    }

    let names: Vec<String> = args.checkpoint.iter().map(|p| report_name(p)).collect();
    if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
        return Err(CliError::input("checkpoints map to duplicate report names; evaluate them separately"));
    }
    for (path, name) in args.checkpoint.iter().zip(&names) {
        let g = load(ctx, path, rec)?;
        let records = evaluate(&g.generator, &g.params, &pairs, baseline)?;
        let mut report = EvalReport::build(&records, policy, baseline);
        report.label = Some(args.label.clone().unwrap_or_else(|| g.config.objective.as_str().to_string()));
        let dir: PathBuf = if args.checkpoint.len() == 1 { ctx.out.clone() } else { ctx.out.join(name) };
        report.write(&dir, &records)?;
        print_summary(name, &report);
    }
    Ok(())
}
