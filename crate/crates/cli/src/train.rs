use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Child, Command};
use std::thread::sleep;
use std::time::Duration;

use ppg2ecg::dataset::load_pairs;
use ppg2ecg::eval::summarize;
use ppg2ecg::training::{train, RunOptions, RunSummary, SweepReport, SweepRun, TrainConfig};

use crate::config::{parse_seeds, FileConfig, TrainOverrides};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::preprocess::{write_json, TRAIN_PAIRS, VALIDATION_EVAL_PAIRS};
use crate::{Context, TrainArgs};

pub const SWEEP_FILE: &str = "sweep.json";
const WORKER_CONFIG: &str = "worker_config.json";

/// `train` with one seed runs in-process; with several, or for `sweep`,
/// each seed is a child process writing `<out>/seed_<seed>`.
pub fn run(ctx: &Context, args: &TrainArgs, rec: &mut Recorder, sweep: bool) -> CliResult<()> {
    let data = args
        .data
        .clone()
        .or_else(|| ctx.file.data.clone())
        .ok_or_else(|| CliError::input("training needs --data <preprocessed dir>"))?;
    let config = ctx.train_config(args.overrides())?;
    rec.fingerprint = Some(config.fingerprint());
    let seeds = match args.seeds.as_deref().or(ctx.file.seeds.as_deref()) {
        Some(s) => parse_seeds(s)?,
        None => vec![ctx.seed],
    };
    let mut unique = seeds.clone();
    unique.sort_unstable();
    unique.dedup();
    if unique.len() != seeds.len() {
        return Err(CliError::input("seed list contains duplicates"));
    }
    rec.seeds = seeds.clone();
    if !sweep && seeds.len() == 1 {
        return train_one(ctx, &data, &config, args, rec);
    }
    fan_out(ctx, &data, &config, args, &seeds, sweep)
}

fn train_one(ctx: &Context, data: &Path, config: &TrainConfig, args: &TrainArgs, rec: &mut Recorder) -> CliResult<()> {
    let train_path = data.join(TRAIN_PAIRS);
    rec.input(&train_path);
    let pairs = load_pairs(&train_path)?;
    let val_path = data.join(VALIDATION_EVAL_PAIRS);
    let validation = if val_path.is_file() {
        rec.input(&val_path);
        Some(load_pairs(&val_path)?)
    } else {
        None
    };
    let opts = RunOptions {
        dir: Some(&ctx.out),
        validation: validation.as_deref(),
        resume: args.resume,
        stop_after: args.stop_after,
    };
    let outcome = train(config, &pairs, &opts)?;
    let s = &outcome.summary;
    println!(
        "seed {}: {} epochs, best validation MAPE {}",
        s.seed,
        s.epochs_completed,
        s.best_val_mape.map_or("n/a".to_string(), |m| format!("{m:.2}% (epoch {})", s.best_epoch.unwrap_or(0)))
    );
    Ok(())
}

fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed_{seed}"))
}

fn spawn(ctx: &Context, config_path: &Path, args: &TrainArgs, seed: u64) -> CliResult<Child> {
    let exe = std::env::current_exe().map_err(|e| CliError::input(format!("cannot locate own executable: {e}")))?;
    let mut cmd = Command::new(exe);
    cmd.arg("--config")
        .arg(config_path)
        .arg("--seed")
        .arg(seed.to_string())
        .arg("--out")
        .arg(seed_dir(&ctx.out, seed))
        .arg("train");
    if args.resume {
        cmd.arg("--resume");
    }
    if let Some(n) = args.stop_after {
        cmd.arg("--stop-after").arg(n.to_string());
    }
    cmd.spawn().map_err(|e| CliError::input(format!("cannot start worker for seed {seed}: {e}")))
}

fn fan_out(ctx: &Context, data: &Path, config: &TrainConfig, args: &TrainArgs, seeds: &[u64], sweep: bool) -> CliResult<()> {
    fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    let worker = FileConfig {
        data: Some(data.to_path_buf()),
        train: TrainOverrides::from_config(config),
        ..Default::default()
    };
    let config_path = ctx.out.join(WORKER_CONFIG);
    write_json(&config_path, &worker)?;

    let mut codes: Vec<Option<i32>> = vec![None; seeds.len()];
    let mut running: Vec<(usize, Child)> = Vec::new();
    let mut next = 0;
    while next < seeds.len() || !running.is_empty() {
        while next < seeds.len() && running.len() < ctx.jobs {
            running.push((next, spawn(ctx, &config_path, args, seeds[next])?));
            next += 1;
        }
        let mut i = 0;
        while i < running.len() {
            let status = running[i].1.try_wait().map_err(|e| CliError::input(format!("worker wait failed: {e}")))?;
            match status {
                Some(st) => {
                    let (idx, _) = running.swap_remove(i);
                    codes[idx] = Some(st.code().unwrap_or(2));
                }
                None => i += 1,
            }
        }
        sleep(Duration::from_millis(20));
    }

    let runs: Vec<SweepRun> = seeds
        .iter()
        .zip(&codes)
        .map(|(&seed, code)| {
            let code = code.unwrap_or(2);
            let summary = read_summary(&seed_dir(&ctx.out, seed));
            let error = match (code, &summary) {
                (0, Some(_)) => None,
                (0, None) => Some("worker finished without a summary.json".to_string()),
                (c, _) => Some(format!("worker exited with code {c}")),
            };
            SweepRun { seed, summary: if error.is_none() { summary } else { None }, error }
        })
        .collect();
    let mapes: Vec<f64> = runs.iter().filter_map(SweepRun::best_val_mape).collect();
    let report = SweepReport { distribution: (!mapes.is_empty()).then(|| summarize(&mapes)), runs };
    write_json(&ctx.out.join(SWEEP_FILE), &report)?;
    let failed = report.runs.iter().filter(|r| r.error.is_some()).count();
    println!("{} runs, {} failed; summary in {}", report.runs.len(), failed, ctx.out.join(SWEEP_FILE).display());
    if sweep {
        return Ok(());
    }
    match codes.iter().map(|c| c.unwrap_or(2)).find(|&c| c != 0) {
        Some(code) => Err(CliError::Child(code, format!("{failed} of {} training runs failed", seeds.len()))),
        None => Ok(()),
    }
}

fn read_summary(dir: &Path) -> Option<RunSummary> {
    let bytes = fs::read(dir.join("summary.json")).ok()?;
    serde_json::from_slice(&bytes).ok()
}
