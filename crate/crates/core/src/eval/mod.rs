//! Heart-rate extraction and the MAPE benchmark.

pub mod hr;
pub mod metrics;
pub mod ppg;
pub mod qrs;
pub mod report;
pub mod stats;

pub use hr::{heart_rate, HR_BOUNDS_BPM};
pub use metrics::{
    activity_subset, failure_count, mape, mape_with, Estimate, EvalRecord, FailurePolicy, MapeSummary, Subset,
};
pub use ppg::{detect_ppg_peaks, PpgPeakDetector};
pub use qrs::{detect_qrs, QrsDetector};
pub use report::{records_csv, EvalReport};
pub use stats::{compare_distributions, summarize, DistributionSummary, SeedDistribution, NORMALITY_CAVEAT};

use crate::dataset::SegmentPair;
use crate::model::{Generator, ParameterSet, Tensor};
use crate::Result;

/// Windows per generator call during evaluation.
pub const EVAL_BATCH: usize = 32;

/// Runs the generator over `pairs` and scores every window. The PPG
/// baseline column is filled only when `baseline` is set.
pub fn evaluate(
    generator: &Generator,
    params: &ParameterSet,
    pairs: &[SegmentPair],
    baseline: bool,
) -> Result<Vec<EvalRecord>> {
    let mut out = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(EVAL_BATCH) {
        let x = Tensor::from_signals(chunk.iter().map(|p| p.ppg.samples.as_slice()))?;
        let y = generator.forward(params, &x)?;
        for (i, pair) in chunk.iter().enumerate() {
            out.push(score(pair, y.signal(i), baseline));
        }
    }
    Ok(out)
}

/// Scores `pairs` with the real ECG standing in for the synthetic one.
pub fn evaluate_self(pairs: &[SegmentPair], baseline: bool) -> Vec<EvalRecord> {
    pairs.iter().map(|p| score(p, &p.ecg.samples, baseline)).collect()
}

fn score(pair: &SegmentPair, synth: &[f64], baseline: bool) -> EvalRecord {
    let rate = pair.ecg.rate;
    let qrs = QrsDetector::new(rate);
    EvalRecord {
        subject: pair.subject().to_string(),
        activity: pair.activity(),
        origin: pair.origin(),
        hr_real: heart_rate(&qrs.detect(&pair.ecg.samples), rate),
        hr_synth: heart_rate(&qrs.detect(synth), rate),
        hr_ppg: if baseline {
            heart_rate(&detect_ppg_peaks(&pair.ppg.samples, pair.ppg.rate), pair.ppg.rate)
        } else {
            None
        },
    }
}
