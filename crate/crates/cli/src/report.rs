use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ppg2ecg::eval::{compare_distributions, EvalReport, MapeSummary, Subset, NORMALITY_CAVEAT};
use ppg2ecg::training::SweepReport;

use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::svg::{edges, histogram_csv, histogram_svg, integer_edges, Series};
use crate::train::SWEEP_FILE;
use crate::{Context, ReportArgs};

const REPORT_FILE: &str = "report.json";
const MAPE_BINS: usize = 15;
const FAILURE_BINS: usize = 20;
const TABLE_SUBSETS: [Subset; 3] = [Subset::All, Subset::NotActive, Subset::Active];

enum Source {
    Eval(EvalReport),
    Sweep(SweepReport),
}

fn collect(path: &Path, found: &mut Vec<PathBuf>) -> CliResult<()> {
    if path.is_file() {
        found.push(path.to_path_buf());
        return Ok(());
    }
    let mut entries: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect(&p, found)?;
        } else if p.file_name().is_some_and(|n| n == REPORT_FILE || n == SWEEP_FILE) {
            found.push(p);
        }
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<Source> {
    if path.file_name().is_some_and(|n| n == SWEEP_FILE) {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        let sweep = serde_json::from_slice(&bytes).map_err(|e| ppg2ecg::Error::Corrupt {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        return Ok(Source::Sweep(sweep));
    }
    Ok(Source::Eval(EvalReport::read(path)?))
}

/// Per-label MAPE and failure-count samples.
#[derive(Default)]
struct Group {
    mape: Vec<f64>,
    failures: Vec<f64>,
    from_sweep: bool,
    from_eval: bool,
}

fn sweep_label(sweep: &SweepReport, path: &Path) -> String {
    sweep
        .runs
        .iter()
        .find_map(|r| r.summary.as_ref().map(|s| s.objective.as_str().to_string()))
        .unwrap_or_else(|| path.parent().and_then(Path::file_name).map_or("sweep".into(), |n| n.to_string_lossy().into_owned()))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

fn subset_cell(rows: Option<&Vec<MapeSummary>>, s: Subset) -> String {
    cell(rows.and_then(|r| r.iter().find(|m| m.subset == s)).and_then(|m| m.mape_percent))
}

pub fn run(ctx: &Context, args: &ReportArgs, rec: &mut Recorder) -> CliResult<()> {
    let mut files = Vec::new();
    for p in &args.inputs {
        if !p.exists() {
            return Err(CliError::input(format!("{} does not exist", p.display())));
        }
        collect(p, &mut files)?;
    }
    if files.is_empty() {
        return Err(CliError::input("no report.json or sweep.json found in the given paths"));
    }

    let mut groups: BTreeMap<String, Group> = BTreeMap::new();
    let mut table = String::from("path,label,policy,n_windows");
    for s in TABLE_SUBSETS {
        let _ = write!(table, ",mape_{s}");
    }
    for s in TABLE_SUBSETS {
        let _ = write!(table, ",ppg_mape_{s}");
    }
    table.push_str(",failures,real_failures\n");

    for path in &files {
        rec.input(path);
        match read(path)? {
            Source::Eval(r) => {
                let label = r.label.clone().unwrap_or_else(|| "unlabeled".into());
                let g = groups.entry(label.clone()).or_default();
                g.from_eval = true;
                if let Some(m) = r.mape(Subset::All) {
                    g.mape.push(m);
                }
                g.failures.push(r.failures as f64);
                let _ = write!(table, "{},{label},{:?},{}", path.display(), r.policy, r.n_windows);
                for s in TABLE_SUBSETS {
                    let _ = write!(table, ",{}", cell(r.mape(s)));
                }
                for s in TABLE_SUBSETS {
                    let _ = write!(table, ",{}", subset_cell(r.ppg_baseline.as_ref(), s));
                }
                let _ = writeln!(table, ",{},{}", r.failures, r.real_failures);
            }
            Source::Sweep(sw) => {
                let g = groups.entry(sweep_label(&sw, path)).or_default();
                g.from_sweep = true;
                for summary in sw.runs.iter().filter_map(|r| r.summary.as_ref()) {
                    let Some(m) = summary.best_val_mape else { continue };
                    g.mape.push(m);
                    let best = summary.epochs.iter().find(|e| Some(e.epoch) == summary.best_epoch);
                    if let Some(f) = best.and_then(|e| e.val_failures) {
                        g.failures.push(f as f64);
                    }
                }
            }
        }
    }
    if let Some((label, _)) = groups.iter().find(|(_, g)| g.from_sweep && g.from_eval) {
        return Err(CliError::input(format!(
            "label {label:?} has both sweep and evaluation results; report them separately"
        )));
    }
    let mape: Vec<Series> = groups.iter().filter(|(_, g)| !g.mape.is_empty()).map(|(k, g)| (k.clone(), g.mape.clone())).collect();
    if mape.is_empty() {
        return Err(CliError::input("none of the inputs holds a completed evaluation"));
    }
    let failures: Vec<Series> =
        groups.iter().filter(|(_, g)| !g.failures.is_empty()).map(|(k, g)| (k.clone(), g.failures.clone())).collect();

    let mut comparison = String::from("metric,group_a,group_b,n_a,mean_a,std_a,n_b,mean_b,std_b,t,df,p_value,caveat\n");
    let mut note = None;
    for (metric, series) in [("mape", &mape), ("failures", &failures)] {
        for i in 0..series.len() {
            for j in i + 1..series.len() {
                let (a, b) = (&series[i], &series[j]);
                let Ok(d) = compare_distributions(&a.1, &b.1) else { continue };
                let _ = writeln!(
                    comparison,
                    "{metric},{},{},{},{},{},{},{},{},{},{},{},\"{NORMALITY_CAVEAT}\"",
                    a.0,
                    b.0,
                    a.1.len(),
                    d.a.mean,
                    d.a.std,
                    b.1.len(),
                    d.b.mean,
                    d.b.std,
                    d.t,
                    d.df,
                    d.p_value
                );
                if metric == "mape" && note.is_none() {
                    note = Some(format!("{} vs {}: t = {:.3}, df = {}, p = {:.4} (pooled t-test)", a.0, b.0, d.t, d.df, d.p_value));
                }
            }
        }
    }

    fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    let write = |name: &str, text: &str| -> CliResult<()> {
        let p = ctx.out.join(name);
        fs::write(&p, text).map_err(|e| CliError::io(&p, e))
    };
    let all_mape: Vec<f64> = mape.iter().flat_map(|s| s.1.iter().copied()).collect();
    let e = edges(&all_mape, MAPE_BINS);
    write("mape_histogram.csv", &histogram_csv(&mape, &e))?;
    write("mape_histogram.svg", &histogram_svg("Heart-rate MAPE per run", "MAPE (%)", &mape, &e, note.as_deref()))?;
    if !failures.is_empty() {
        let all: Vec<f64> = failures.iter().flat_map(|s| s.1.iter().copied()).collect();
        let e = integer_edges(&all, FAILURE_BINS);
        write("failure_histogram.csv", &histogram_csv(&failures, &e))?;
        write("failure_histogram.svg", &histogram_svg("Failed windows per run", "failed windows", &failures, &e, None))?;
    }
    write("comparison.csv", &comparison)?;
    write("table.csv", &table)?;
    for (name, values) in &mape {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        println!("{name}: {} run(s), mean MAPE {mean:.2}%", values.len());
    }
    if let Some(n) = note {
        println!("{n}");
        println!("note: {NORMALITY_CAVEAT}");
    }
    Ok(())
}
