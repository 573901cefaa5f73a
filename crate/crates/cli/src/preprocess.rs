use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use ppg2ecg::dataset::{
    discover_subjects, load_subject, make_split, save_pairs, PairReport, Preprocessor, SegmentPair, SplitAssignment,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{Context, PreprocessArgs};

pub const TRAIN_WINDOW_S: f64 = 4.0;
pub const EVAL_WINDOW_S: f64 = 10.0;
pub const HOP_S: f64 = 2.0;

pub const SPLIT_FILE: &str = "split.json";
pub const TRAIN_PAIRS: &str = "train.pairs";
pub const VALIDATION_EVAL_PAIRS: &str = "validation_eval.pairs";

/// Reported segment counts for the full 15-subject corpus.
pub const REFERENCE_COUNTS: SplitCounts = SplitCounts { train: 40675, validation: 11276, test: 12796 };
const REFERENCE_SUBJECTS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Serialize)]
struct SubjectCounts {
    subject: String,
    split: &'static str,
    train_windows: PairReport,
    eval_windows: PairReport,
}

#[derive(Debug, Serialize)]
struct ReferenceComparison {
    expected: SplitCounts,
    found: SplitCounts,
    matches: bool,
}

#[derive(Debug, Serialize)]
struct SplitReport {
    split_seed: u64,
    subjects: SplitAssignment,
    counts: SplitCounts,
    eval_counts: SplitCounts,
    per_subject: Vec<SubjectCounts>,
    reference: Option<ReferenceComparison>,
    warnings: Vec<String>,
}

fn split_of(split: &SplitAssignment, subject: &str) -> &'static str {
    if split.validation.contains(subject) {
        "validation"
    } else if split.test.contains(subject) {
        "test"
    } else {
        "train"
    }
}

pub fn run(ctx: &Context, args: &PreprocessArgs, rec: &mut Recorder) -> CliResult<()> {
    let data = args
        .data
        .clone()
        .or_else(|| ctx.file.data.clone())
        .ok_or_else(|| CliError::input("preprocess needs --data <interchange dir>"))?;
    rec.input(&data);
    let split_seed = args.split_seed.or(ctx.file.split_seed).unwrap_or(ctx.seed);
    rec.seeds.push(split_seed);

    let dirs = discover_subjects(&data)?;
    if dirs.is_empty() {
        return Err(CliError::input(format!("no subject directories under {}", data.display())));
    }
    let pre = Preprocessor::new()?;
    let mut subjects = Vec::new();
    for dir in &dirs {
        let record = load_subject(dir)?;
        let (train, train_report) = pre.build_pairs(&record, TRAIN_WINDOW_S, HOP_S)?;
        let (eval, eval_report) = pre.build_pairs(&record, EVAL_WINDOW_S, HOP_S)?;
        subjects.push((record.subject, train, eval, train_report, eval_report));
    }

    let ids: Vec<String> = subjects.iter().map(|s| s.0.clone()).collect();
    let mut warnings = Vec::new();
    let split = if ids.len() < 3 {
        let msg = format!(
            "only {} subject(s): a subject-disjoint split needs at least 3, so every subject goes to train",
            ids.len()
        );
        eprintln!("warning: {msg}");
        warnings.push(msg);
        SplitAssignment { train: ids.iter().cloned().collect(), validation: BTreeSet::new(), test: BTreeSet::new() }
    } else {
        make_split(&ids, split_seed)?
    };

    let mut stores: [(Vec<SegmentPair>, Vec<SegmentPair>); 3] = Default::default();
    let mut per_subject = Vec::new();
    for (subject, train, eval, train_report, eval_report) in subjects {
        let name = split_of(&split, &subject);
        let slot = match name {
            "train" => 0,
            "validation" => 1,
            _ => 2,
        };
        stores[slot].0.extend(train);
        stores[slot].1.extend(eval);
        per_subject.push(SubjectCounts { subject, split: name, train_windows: train_report, eval_windows: eval_report });
    }

    fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    for ((train, eval), name) in stores.iter().zip(["train", "validation", "test"]) {
        save_pairs(ctx.out.join(format!("{name}.pairs")), train)?;
        if name != "train" {
            save_pairs(ctx.out.join(format!("{name}_eval.pairs")), eval)?;
        }
    }

    let counts = SplitCounts { train: stores[0].0.len(), validation: stores[1].0.len(), test: stores[2].0.len() };
    let eval_counts = SplitCounts { train: stores[0].1.len(), validation: stores[1].1.len(), test: stores[2].1.len() };
    let reference = (ids.len() == REFERENCE_SUBJECTS).then(|| {
        let cmp = ReferenceComparison { expected: REFERENCE_COUNTS, found: counts, matches: counts == REFERENCE_COUNTS };
        println!(
            "segments train/validation/test: {}/{}/{} (reference {}/{}/{}){}",
            counts.train,
            counts.validation,
            counts.test,
            REFERENCE_COUNTS.train,
            REFERENCE_COUNTS.validation,
            REFERENCE_COUNTS.test,
            if cmp.matches { "" } else { "; see per_subject in split.json for the breakdown" }
        );
        cmp
    });
    if reference.is_none() {
        println!("segments train/validation/test: {}/{}/{}", counts.train, counts.validation, counts.test);
    }
    let report = SplitReport { split_seed, subjects: split, counts, eval_counts, per_subject, reference, warnings };
    write_json(&ctx.out.join(SPLIT_FILE), &report)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let bytes = serde_json::to_vec_pretty(value)?;
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
