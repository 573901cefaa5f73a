use std::f64::consts::PI;

use super::{ActivityInterval, Waveform};
use crate::{Error, Result};

/// Kaiser window shape parameter of the interpolation kernel.
const KAISER_BETA: f64 = 8.0;
/// Kernel cutoff as a fraction of the lower of the two Nyquist frequencies.
const CUTOFF_FRACTION: f64 = 0.9;
/// Zero crossings of the sinc on each side of the kernel centre.
const ZERO_CROSSINGS: f64 = 16.0;

/// Resamples a waveform and remaps its activity intervals proportionally.
pub fn resample(w: &Waveform, target_rate: f64) -> Result<Waveform> {
    let samples = resample_samples(&w.samples, w.rate, target_rate)?;
    let n_out = samples.len();
    let ratio = target_rate / w.rate;
    let activities = w
        .activities
        .iter()
        .filter_map(|iv| {
            let start = ((iv.start as f64 * ratio).round() as usize).min(n_out);
            let end = ((iv.end as f64 * ratio).round() as usize).min(n_out);
            (start < end).then_some(ActivityInterval { start, end, label: iv.label })
        })
        .collect();
    Ok(Waveform {
        samples,
        rate: target_rate,
        channel: w.channel,
        subject: w.subject.clone(),
        activities,
    })
}

/// Band-limited interpolation with a Kaiser-windowed sinc kernel.
///
/// The kernel cutoff sits at 0.9 of the lower Nyquist frequency, so
/// downsampling is always anti-aliased. Output length is
/// `round(len * target_rate / rate)`. Integer rate pairs use a precomputed
/// polyphase bank; other ratios evaluate the kernel per tap.
pub fn resample_samples(x: &[f64], rate: f64, target_rate: f64) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptySignal);
    }
    for r in [rate, target_rate] {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidRate(r));
        }
    }
    if rate == target_rate {
        return Ok(x.to_vec());
    }

    let n_out = (x.len() as f64 * target_rate / rate).round() as usize;
    let kernel = Kernel::new(rate, target_rate);

    if let Some((up, down)) = integer_ratio(rate, target_rate) {
        let bank: Vec<Vec<f64>> = (0..up)
            .map(|phase| kernel.taps(phase as f64 / up as f64))
            .collect();
        Ok((0..n_out)
            .map(|m| {
                let num = m as u64 * down;
                let base = (num / up) as isize;
                let phase = (num % up) as usize;
                kernel.apply(x, base, &bank[phase])
            })
            .collect())
    } else {
        let step = rate / target_rate;
        Ok((0..n_out)
            .map(|m| {
                let pos = m as f64 * step;
                let base = pos.floor();
                let taps = kernel.taps(pos - base);
                kernel.apply(x, base as isize, &taps)
            })
            .collect())
    }
}

fn integer_ratio(rate: f64, target: f64) -> Option<(u64, u64)> {
    let is_int = |v: f64| v.fract() == 0.0 && v < 1e9;
    if !(is_int(rate) && is_int(target)) {
        return None;
    }
    let (a, b) = (rate as u64, target as u64);
    let g = gcd(a, b);
    Some((b / g, a / g))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct Kernel {
    /// Cutoff in cycles per input sample.
    cutoff: f64,
    half_width: f64,
    radius: isize,
}

impl Kernel {
    fn new(rate: f64, target_rate: f64) -> Self {
        let cutoff_hz = CUTOFF_FRACTION * rate.min(target_rate) / 2.0;
        let cutoff = cutoff_hz / rate;
        let half_width = ZERO_CROSSINGS / (2.0 * cutoff);
        Kernel {
            cutoff,
            half_width,
            radius: half_width.ceil() as isize,
        }
    }

    /// Taps for input offsets `-radius..=radius` relative to the sample at or
    /// before the output instant, `frac` input samples behind it.
    fn taps(&self, frac: f64) -> Vec<f64> {
        let i0 = bessel_i0(KAISER_BETA);
        let mut taps: Vec<f64> = (-self.radius..=self.radius)
            .map(|j| {
                let tau = j as f64 - frac;
                let r = tau / self.half_width;
                if r.abs() > 1.0 {
                    return 0.0;
                }
                let window = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / i0;
                2.0 * self.cutoff * sinc(2.0 * self.cutoff * tau) * window
            })
            .collect();
        // unit DC gain per phase
        let sum: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= sum);
        taps
    }

    fn apply(&self, x: &[f64], base: isize, taps: &[f64]) -> f64 {
        let n = x.len() as isize;
        let start = base - self.radius;
        if start >= 0 && start + taps.len() as isize <= n {
            let s = start as usize;
            x[s..s + taps.len()]
                .iter()
                .zip(taps)
                .map(|(a, b)| a * b)
                .sum()
        } else {
            taps.iter()
                .enumerate()
                .map(|(k, t)| t * extended(x, start + k as isize))
                .sum()
        }
    }
}

/// Odd-symmetric extension about the end samples, which keeps the
/// extension linear in `x` and continues local trends.
fn extended(x: &[f64], i: isize) -> f64 {
    let n = x.len() as isize;
    if n == 1 {
        return x[0];
    }
    if i < 0 {
        let j = (-i).min(n - 1);
        2.0 * x[0] - x[j as usize]
    } else if i >= n {
        let j = (2 * (n - 1) - i).max(0);
        2.0 * x[(n - 1) as usize] - x[j as usize]
    } else {
        x[i as usize]
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}
