use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{failure_count, mape_with, Estimate, EvalRecord, FailurePolicy, MapeSummary, Subset};
use super::stats::{SeedDistribution, NORMALITY_CAVEAT};
use crate::{Error, Result};

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: Option<String>,
    pub policy: FailurePolicy,
    pub n_windows: usize,
    /// Synthetic-ECG MAPE per non-empty subset.
    pub synthetic: Vec<MapeSummary>,
    pub ppg_baseline: Option<Vec<MapeSummary>>,
    pub failures: usize,
    pub real_failures: usize,
    pub seed_statistics: Option<SeedDistribution>,
    pub caveat: String,
}

impl EvalReport {
    pub fn build(records: &[EvalRecord], policy: FailurePolicy, baseline: bool) -> Self {
        let per_subset = |estimate| {
            Subset::ALL
                .into_iter()
                .filter_map(|s| mape_with(records, s, estimate, policy).ok())
                .collect::<Vec<_>>()
        };
        EvalReport {
            label: None,
            policy,
            n_windows: records.len(),
            synthetic: per_subset(Estimate::Synthetic),
            ppg_baseline: baseline.then(|| per_subset(Estimate::PpgBaseline)),
            failures: failure_count(records),
            real_failures: records.iter().filter(|r| r.hr_real.is_none()).count(),
            seed_statistics: None,
            caveat: NORMALITY_CAVEAT.to_string(),
        }
    }

    pub fn mape(&self, subset: Subset) -> Option<f64> {
        self.synthetic.iter().find(|m| m.subset == subset).and_then(|m| m.mape_percent)
    }

    pub fn write(&self, dir: &Path, records: &[EvalRecord]) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = dir.join("report.json");
        fs::write(&json, serde_json::to_vec_pretty(self)?).map_err(|e| Error::io(&json, e))?;
        let csv = dir.join("report.csv");
        fs::write(&csv, records_csv(records)).map_err(|e| Error::io(&csv, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Corrupt {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

pub fn records_csv(records: &[EvalRecord]) -> String {
    let mut out =
        String::from("subject,activity,origin,hr_real,hr_synth,hr_ppg_baseline,real_failed,synth_failed,ppg_failed\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.subject,
            r.activity,
            r.origin,
            cell(r.hr_real),
            cell(r.hr_synth),
            cell(r.hr_ppg),
            r.hr_real.is_none() as u8,
            r.hr_synth.is_none() as u8,
            r.hr_ppg.is_none() as u8,
        );
    }
    out
}
