use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::signal::Activity;
use crate::{Error, Result};

/// Heart rates of one evaluation window; `None` marks a detector failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub subject: String,
    pub activity: Activity,
    pub origin: usize,
    pub hr_real: Option<f64>,
    pub hr_synth: Option<f64>,
    pub hr_ppg: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    All,
    NotActive,
    Active,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::All, Subset::NotActive, Subset::Active];

    /// Transient windows belong to no subset.
    pub fn contains(self, activity: Activity) -> bool {
        if activity == Activity::Transient {
            return false;
        }
        match self {
            Subset::All => true,
            Subset::Active => activity.is_active(),
            Subset::NotActive => !activity.is_active(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::NotActive => "not_active",
            Subset::Active => "active",
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subset::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown subset {s:?}")))
    }
}

/// How windows whose estimate failed enter the MAPE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailurePolicy {
    /// Left out of the mean and counted separately.
    #[default]
    Exclude,
    /// Scored as a 100% error.
    CountAsFullError,
}

/// Which heart-rate estimate is compared against the real ECG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    Synthetic,
    PpgBaseline,
}

impl Estimate {
    fn of(self, r: &EvalRecord) -> Option<f64> {
        match self {
            Estimate::Synthetic => r.hr_synth,
            Estimate::PpgBaseline => r.hr_ppg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapeSummary {
    pub subset: Subset,
    /// `None` when no window could be scored.
    pub mape_percent: Option<f64>,
    pub n_windows: usize,
    pub n_scored: usize,
    /// Windows where the estimate failed but the real ECG did not.
    pub n_failures: usize,
    /// Windows excluded because the real ECG itself failed.
    pub n_real_failures: usize,
}

pub fn activity_subset(records: &[EvalRecord], subset: Subset) -> Vec<&EvalRecord> {
    records.iter().filter(|r| subset.contains(r.activity)).collect()
}

/// Synthetic-ECG MAPE with failed estimates excluded.
pub fn mape(records: &[EvalRecord], subset: Subset) -> Result<MapeSummary> {
    mape_with(records, subset, Estimate::Synthetic, FailurePolicy::Exclude)
}

pub fn mape_with(
    records: &[EvalRecord],
    subset: Subset,
    estimate: Estimate,
    policy: FailurePolicy,
) -> Result<MapeSummary> {
    let rows = activity_subset(records, subset);
    if rows.is_empty() {
        return Err(Error::EmptySubset(subset.to_string()));
    }
    let mut sum = 0.0;
    let mut scored = 0;
    let mut failures = 0;
    let mut real_failures = 0;
    for r in &rows {
        let Some(real) = r.hr_real else {
            real_failures += 1;
            continue;
        };
        match estimate.of(r) {
            Some(est) => {
                sum += (real - est).abs() / real;
                scored += 1;
            }
            None => {
                failures += 1;
                if policy == FailurePolicy::CountAsFullError {
                    sum += 1.0;
                    scored += 1;
                }
            }
        }
    }
    Ok(MapeSummary {
        subset,
        mape_percent: (scored > 0).then(|| 100.0 * sum / scored as f64),
        n_windows: rows.len(),
        n_scored: scored,
        n_failures: failures,
        n_real_failures: real_failures,
    })
}

/// Windows where the synthetic ECG failed while the real one did not.
pub fn failure_count(records: &[EvalRecord]) -> usize {
    records.iter().filter(|r| r.hr_real.is_some() && r.hr_synth.is_none()).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(activity: Activity, real: Option<f64>, synth: Option<f64>) -> EvalRecord {
        EvalRecord { subject: "S1".into(), activity, origin: 0, hr_real: real, hr_synth: synth, hr_ppg: None }
    }

    #[test]
    fn single_window_arithmetic() {
        let r = [rec(Activity::Sitting, Some(60.0), Some(63.0))];
        let m = mape(&r, Subset::All).unwrap();
        assert!((m.mape_percent.unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn subsets() {
        assert!(Subset::Active.contains(Activity::Cycling));
        assert!(!Subset::NotActive.contains(Activity::Cycling));
        assert!(Subset::NotActive.contains(Activity::Sitting));
        assert!(Subset::NotActive.contains(Activity::Lunch));
        for s in Subset::ALL {
            assert!(!s.contains(Activity::Transient));
        }
    }

    #[test]
    fn failure_accounting() {
        let r = [
            rec(Activity::Walking, Some(100.0), Some(110.0)),
            rec(Activity::Walking, Some(100.0), None),
            rec(Activity::Walking, None, None),
            rec(Activity::Walking, None, Some(90.0)),
        ];
        let m = mape(&r, Subset::Active).unwrap();
        assert_eq!((m.n_windows, m.n_scored, m.n_failures, m.n_real_failures), (4, 1, 1, 2));
        assert!((m.mape_percent.unwrap() - 10.0).abs() < 1e-12);
        let full = mape_with(&r, Subset::Active, Estimate::Synthetic, FailurePolicy::CountAsFullError).unwrap();
        assert!((full.mape_percent.unwrap() - 55.0).abs() < 1e-12);
        assert_eq!(failure_count(&r), 1);
        assert!(matches!(mape(&r, Subset::NotActive), Err(Error::EmptySubset(_))));
    }

    #[test]
    fn nothing_scored() {
        let r = [rec(Activity::Sitting, Some(60.0), None)];
        assert_eq!(mape(&r, Subset::All).unwrap().mape_percent, None);
    }
}
