/// Plausible heart-rate range in beats per minute.
pub const HR_BOUNDS_BPM: (f64, f64) = (20.0, 300.0);

/// `60 / mean inter-peak interval`, or `None` for fewer than two peaks or
/// a rate outside [`HR_BOUNDS_BPM`].
pub fn heart_rate(peaks: &[usize], rate: f64) -> Option<f64> {
    if peaks.len() < 2 {
        return None;
    }
    let span = (peaks[peaks.len() - 1] - peaks[0]) as f64 / rate;
    let mean_interval = span / (peaks.len() - 1) as f64;
    if mean_interval <= 0.0 {
        return None;
    }
    let bpm = 60.0 / mean_interval;
    (HR_BOUNDS_BPM.0..=HR_BOUNDS_BPM.1).contains(&bpm).then_some(bpm)
}

/// Centered moving average; windows are truncated at the edges.
pub(crate) fn moving_average(x: &[f64], width: usize) -> Vec<f64> {
    let width = width.max(1);
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    let half = width / 2;
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + width - half).min(x.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub(crate) fn samples(seconds: f64, rate: f64) -> usize {
    ((seconds * rate).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_second_spacing_is_sixty() {
        let peaks: Vec<usize> = (0..10).map(|i| i * 128).collect();
        assert_eq!(heart_rate(&peaks, 128.0), Some(60.0));
        let peaks: Vec<usize> = (0..10).map(|i| i * 64).collect();
        assert_eq!(heart_rate(&peaks, 128.0), Some(120.0));
    }

    #[test]
    fn failures() {
        assert_eq!(heart_rate(&[], 128.0), None);
        assert_eq!(heart_rate(&[40], 128.0), None);
        // 10 s spacing is 6 bpm
        assert_eq!(heart_rate(&[0, 1280], 128.0), None);
        // 0.1 s spacing is 600 bpm
        assert_eq!(heart_rate(&[0, 13, 26], 128.0), None);
    }

    #[test]
    fn moving_average_edges() {
        assert_eq!(moving_average(&[3.0, 3.0, 3.0, 3.0], 3), vec![3.0; 4]);
        let m = moving_average(&[0.0, 0.0, 6.0, 0.0, 0.0], 3);
        assert_eq!(m, vec![0.0, 2.0, 2.0, 2.0, 0.0]);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
