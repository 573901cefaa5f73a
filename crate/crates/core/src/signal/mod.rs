//! Deterministic DSP primitives shared by the dataset, training and evaluation code.

mod filter;
mod resample;
mod spectrum;
mod window;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use filter::{
    bandpass, butterworth, firwin_bandpass, BandType, BandpassSpec, FilterDesign, Sos,
    ZeroPhaseFilter,
};
pub use resample::{resample, resample_samples};
pub use spectrum::{magnitude_spectrum, MagnitudeSpectrum, SpectrumPlan};
pub use window::{minmax_scale, minmax_scale_segment, segment, segment_count};

/// Sampling rate used for every model input and evaluation window.
pub const MODEL_RATE_HZ: f64 = 128.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Ppg,
    Ecg,
}

/// Activity vocabulary of the interchange format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Sitting,
    Stairs,
    TableSoccer,
    Cycling,
    Driving,
    Lunch,
    Walking,
    Working,
    Transient,
}

impl Activity {
    pub const ALL: [Activity; 9] = [
        Activity::Sitting,
        Activity::Stairs,
        Activity::TableSoccer,
        Activity::Cycling,
        Activity::Driving,
        Activity::Lunch,
        Activity::Walking,
        Activity::Working,
        Activity::Transient,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Activity::Sitting => "sitting",
            Activity::Stairs => "stairs",
            Activity::TableSoccer => "table_soccer",
            Activity::Cycling => "cycling",
            Activity::Driving => "driving",
            Activity::Lunch => "lunch",
            Activity::Walking => "walking",
            Activity::Working => "working",
            Activity::Transient => "transient",
        }
    }

    /// Activities with elevated heart rate.
    pub fn is_active(self) -> bool {
        matches!(
            self,
            Activity::Stairs
                | Activity::TableSoccer
                | Activity::Cycling
                | Activity::Driving
                | Activity::Walking
                | Activity::Working
        )
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Activity::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::UnknownActivity(s.to_string()))
    }
}

/// Half-open sample interval `[start, end)` carrying one activity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityInterval {
    pub start: usize,
    pub end: usize,
    pub label: Activity,
}

/// A uniformly sampled single-channel recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub rate: f64,
    pub channel: Channel,
    pub subject: String,
    pub activities: Vec<ActivityInterval>,
}

impl Waveform {
    /// Builds a waveform, checking the rate and the activity interval layout.
    pub fn new(
        samples: Vec<f64>,
        rate: f64,
        channel: Channel,
        subject: impl Into<String>,
        activities: Vec<ActivityInterval>,
    ) -> Result<Self> {
        let w = Waveform {
            samples,
            rate,
            channel,
            subject: subject.into(),
            activities,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::InvalidRate(self.rate));
        }
        let mut prev_end = 0usize;
        for (i, iv) in self.activities.iter().enumerate() {
            if iv.start >= iv.end || iv.end > self.samples.len() {
                return Err(Error::InvalidWaveform(format!(
                    "activity interval {i} [{}, {}) outside [0, {})",
                    iv.start,
                    iv.end,
                    self.samples.len()
                )));
            }
            if i > 0 && iv.start < prev_end {
                return Err(Error::InvalidWaveform(format!(
                    "activity interval {i} overlaps or is out of order"
                )));
            }
            prev_end = iv.end;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    /// Label covering sample `index`, or `Transient` if no interval does.
    pub fn activity_at(&self, index: usize) -> Activity {
        let pos = self.activities.partition_point(|iv| iv.end <= index);
        match self.activities.get(pos) {
            Some(iv) if iv.start <= index => iv.label,
            _ => Activity::Transient,
        }
    }
}

/// A fixed-length window cut from a [`Waveform`].
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub samples: Vec<f64>,
    pub rate: f64,
    pub channel: Channel,
    pub subject: String,
    pub activity: Activity,
    /// Start index of the window in the (resampled) source waveform.
    pub origin: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
