//! Bandpass designs and zero-phase (forward-backward) application.
//!
//! IIR filters are designed in zero/pole/gain form from an analog prototype,
//! frequency-transformed, mapped with the bilinear transform and realised as
//! second-order sections. The FIR design is a Hamming-windowed sinc.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterDesign {
    /// Inverse Chebyshev; the band edges are where the gain first reaches
    /// `-stopband_attenuation_db`.
    ChebyshevII { order: usize, stopband_attenuation_db: f64 },
    /// Linear-phase windowed sinc. `None` picks `3 * rate / low_hz` rounded up
    /// to the next odd count.
    Fir { num_taps: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandpassSpec {
    pub design: FilterDesign,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl BandpassSpec {
    /// PPG band: 0.4–8 Hz, 4th-order Chebyshev II, 40 dB stopband.
    pub fn ppg() -> Self {
        BandpassSpec {
            design: FilterDesign::ChebyshevII { order: 4, stopband_attenuation_db: 40.0 },
            low_hz: 0.4,
            high_hz: 8.0,
        }
    }

    /// ECG band: 3–45 Hz, Hamming FIR.
    pub fn ecg() -> Self {
        BandpassSpec {
            design: FilterDesign::Fir { num_taps: None },
            low_hz: 3.0,
            high_hz: 45.0,
        }
    }

    pub fn validate(&self, rate: f64) -> Result<()> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidRate(rate));
        }
        if !(self.low_hz > 0.0 && self.low_hz < self.high_hz) {
            return Err(Error::InvalidFilter(format!(
                "band edges must satisfy 0 < low < high, got {}..{}",
                self.low_hz, self.high_hz
            )));
        }
        if self.high_hz >= rate / 2.0 {
            return Err(Error::InvalidFilter(format!(
                "high edge {} Hz is not below Nyquist ({} Hz)",
                self.high_hz,
                rate / 2.0
            )));
        }
        match self.design {
            FilterDesign::ChebyshevII { order, stopband_attenuation_db } => {
                if order == 0 || stopband_attenuation_db <= 0.0 {
                    return Err(Error::InvalidFilter("order and attenuation must be positive".into()));
                }
            }
            FilterDesign::Fir { num_taps: Some(n) } if n < 3 || n % 2 == 0 => {
                return Err(Error::InvalidFilter(format!(
                    "bandpass FIR needs an odd tap count >= 3, got {n}"
                )));
            }
            FilterDesign::Fir { .. } => {}
        }
        Ok(())
    }

    /// Designs the filter for signals sampled at `rate`.
    pub fn design(&self, rate: f64) -> Result<ZeroPhaseFilter> {
        self.validate(rate)?;
        Ok(match self.design {
            FilterDesign::ChebyshevII { order, stopband_attenuation_db } => {
                let zpk = cheby2_prototype(order, stopband_attenuation_db);
                ZeroPhaseFilter::Iir(digital_sos(zpk, BandType::Bandpass(self.low_hz, self.high_hz), rate))
            }
            FilterDesign::Fir { num_taps } => {
                let n = num_taps.unwrap_or_else(|| default_fir_taps(rate, self.low_hz));
                ZeroPhaseFilter::Fir(firwin_bandpass(n, self.low_hz, self.high_hz, rate))
            }
        })
    }
}

fn default_fir_taps(rate: f64, low_hz: f64) -> usize {
    let n = (3.0 * rate / low_hz).round() as usize;
    n.max(3) | 1
}

/// Applies `spec` forward and backward so the output has zero phase shift.
pub fn bandpass(x: &[f64], rate: f64, spec: &BandpassSpec) -> Result<Vec<f64>> {
    Ok(spec.design(rate)?.apply(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandType {
    Lowpass(f64),
    Highpass(f64),
    Bandpass(f64, f64),
}

/// Butterworth design of the given prototype order, as second-order sections.
pub fn butterworth(order: usize, band: BandType, rate: f64) -> Sos {
    digital_sos(butter_prototype(order), band, rate)
}

#[derive(Debug, Clone)]
pub enum ZeroPhaseFilter {
    Iir(Sos),
    Fir(Vec<f64>),
}

impl ZeroPhaseFilter {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ZeroPhaseFilter::Iir(sos) => sos.filtfilt(x),
            ZeroPhaseFilter::Fir(taps) => fir_filtfilt(taps, x),
        }
    }

    /// Magnitude of the one-pass frequency response at `freq_hz`.
    pub fn gain(&self, freq_hz: f64, rate: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / rate;
        let z_inv = Complex64::from_polar(1.0, -w);
        match self {
            ZeroPhaseFilter::Iir(sos) => sos.response(z_inv).norm(),
            ZeroPhaseFilter::Fir(taps) => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut zk = Complex64::new(1.0, 0.0);
                for &t in taps {
                    acc += zk * t;
                    zk *= z_inv;
                }
                acc.norm()
            }
        }
    }
}

/// Cascade of biquads `[b0, b1, b2, a0, a1, a2]` with `a0 == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos {
    pub sections: Vec<[f64; 6]>,
}

impl Sos {
    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        self.sections.iter().fold(Complex64::new(1.0, 0.0), |acc, s| {
            let num = s[0] + z_inv * (s[1] + z_inv * s[2]);
            let den = s[3] + z_inv * (s[4] + z_inv * s[5]);
            acc * num / den
        })
    }

    /// Steady-state section states for a unit step input.
    fn step_state(&self) -> Vec<[f64; 2]> {
        let mut scale = 1.0;
        self.sections
            .iter()
            .map(|s| {
                let (b, a) = (&s[..3], &s[3..]);
                let gain = b.iter().sum::<f64>() / a.iter().sum::<f64>();
                let z2 = b[2] - a[2] * gain;
                let z1 = b[1] - a[1] * gain + z2;
                let zi = [scale * z1, scale * z2];
                scale *= gain;
                zi
            })
            .collect()
    }

    /// Direct-form II transposed cascade starting from `state`.
    pub fn filter_with_state(&self, x: &mut [f64], state: &mut [[f64; 2]]) {
        for (s, z) in self.sections.iter().zip(state.iter_mut()) {
            let [b0, b1, b2, _, a1, a2] = *s;
            let [mut z1, mut z2] = *z;
            for v in x.iter_mut() {
                let xin = *v;
                let y = b0 * xin + z1;
                z1 = b1 * xin - a1 * y + z2;
                z2 = b2 * xin - a2 * y;
                *v = y;
            }
            *z = [z1, z2];
        }
    }

    /// Forward-backward filtering with odd extension and steady-state
    /// initial conditions.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        if x.is_empty() {
            return Vec::new();
        }
        let trailing = self
            .sections
            .iter()
            .filter(|s| s[2] == 0.0)
            .count()
            .min(self.sections.iter().filter(|s| s[5] == 0.0).count());
        let ntaps = 2 * self.sections.len() + 1 - trailing;
        let padlen = (3 * ntaps).min(x.len() - 1);
        let mut ext = odd_extend(x, padlen);
        let zi = self.step_state();

        let mut state: Vec<[f64; 2]> = zi.iter().map(|z| [z[0] * ext[0], z[1] * ext[0]]).collect();
        self.filter_with_state(&mut ext, &mut state);
        ext.reverse();
        let mut state: Vec<[f64; 2]> = zi.iter().map(|z| [z[0] * ext[0], z[1] * ext[0]]).collect();
        self.filter_with_state(&mut ext, &mut state);
        ext.reverse();
        ext[padlen..padlen + x.len()].to_vec()
    }
}

fn odd_extend(x: &[f64], padlen: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n + 2 * padlen);
    out.extend((1..=padlen).rev().map(|i| 2.0 * x[0] - x[i]));
    out.extend_from_slice(x);
    out.extend((1..=padlen).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));
    out
}

/// Zero-phase FIR filtering. Each pass treats samples before the start as
/// equal to the first sample, the FIR analogue of steady-state initial
/// conditions.
fn fir_filtfilt(taps: &[f64], x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let padlen = (3 * taps.len()).min(x.len() - 1);
    let ext = odd_extend(x, padlen);
    let mut fwd = fir_pass(taps, &ext);
    fwd.reverse();
    let mut back = fir_pass(taps, &fwd);
    back.reverse();
    back[padlen..padlen + x.len()].to_vec()
}

fn fir_pass(taps: &[f64], x: &[f64]) -> Vec<f64> {
    let first = x[0];
    (0..x.len())
        .map(|n| {
            taps.iter()
                .enumerate()
                .map(|(k, h)| h * if k <= n { x[n - k] } else { first })
                .sum()
        })
        .collect()
}

/// Hamming-windowed bandpass FIR, scaled to unit gain at the band centre.
pub fn firwin_bandpass(num_taps: usize, low_hz: f64, high_hz: f64, rate: f64) -> Vec<f64> {
    let nyq = rate / 2.0;
    let (left, right) = (low_hz / nyq, high_hz / nyq);
    let alpha = (num_taps as f64 - 1.0) / 2.0;
    let sinc = |v: f64| if v == 0.0 { 1.0 } else { (PI * v).sin() / (PI * v) };
    let mut h: Vec<f64> = (0..num_taps)
        .map(|n| {
            let m = n as f64 - alpha;
            let ideal = right * sinc(right * m) - left * sinc(left * m);
            let window = if num_taps > 1 {
                0.54 - 0.46 * (2.0 * PI * n as f64 / (num_taps as f64 - 1.0)).cos()
            } else {
                1.0
            };
            ideal * window
        })
        .collect();
    let centre = 0.5 * (left + right);
    let s: f64 = h
        .iter()
        .enumerate()
        .map(|(n, v)| v * (PI * (n as f64 - alpha) * centre).cos())
        .sum();
    h.iter_mut().for_each(|v| *v /= s);
    h
}

#[derive(Debug, Clone)]
struct Zpk {
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
    gain: f64,
}

fn butter_prototype(order: usize) -> Zpk {
    let n = order as f64;
    let poles = (0..order)
        .map(|i| {
            let m = -(n - 1.0) + 2.0 * i as f64;
            -Complex64::from_polar(1.0, PI * m / (2.0 * n))
        })
        .collect();
    Zpk { zeros: vec![], poles, gain: 1.0 }
}

fn cheby2_prototype(order: usize, rs_db: f64) -> Zpk {
    let n = order as f64;
    let de = 1.0 / (10f64.powf(0.1 * rs_db) - 1.0).sqrt();
    let mu = (1.0 / de).asinh() / n;

    let ms: Vec<f64> = if order % 2 == 1 {
        (0..order)
            .map(|i| -(n - 1.0) + 2.0 * i as f64)
            .filter(|m| *m != 0.0)
            .collect()
    } else {
        (0..order).map(|i| -(n - 1.0) + 2.0 * i as f64).collect()
    };
    let zeros: Vec<Complex64> = ms
        .iter()
        .map(|m| -(Complex64::i() / (m * PI / (2.0 * n)).sin()).conj())
        .collect();
    let poles: Vec<Complex64> = (0..order)
        .map(|i| {
            let m = -(n - 1.0) + 2.0 * i as f64;
            let p = -Complex64::from_polar(1.0, PI * m / (2.0 * n));
            let p = Complex64::new(mu.sinh() * p.re, mu.cosh() * p.im);
            1.0 / p
        })
        .collect();
    let num: Complex64 = poles.iter().map(|p| -p).product();
    let den: Complex64 = zeros.iter().map(|z| -z).product();
    Zpk { zeros, poles, gain: (num / den).re }
}

fn digital_sos(proto: Zpk, band: BandType, rate: f64) -> Sos {
    // prewarp against a normalised sampling rate of 2
    let fs = 2.0;
    let warp = |f_hz: f64| 2.0 * fs * (PI * (f_hz / (rate / 2.0)) / fs).tan();
    let analog = match band {
        BandType::Lowpass(f) => lp2lp(proto, warp(f)),
        BandType::Highpass(f) => lp2hp(proto, warp(f)),
        BandType::Bandpass(lo, hi) => {
            let (w1, w2) = (warp(lo), warp(hi));
            lp2bp(proto, (w1 * w2).sqrt(), w2 - w1)
        }
    };
    zpk_to_sos(bilinear(analog, fs))
}

fn lp2lp(z: Zpk, wo: f64) -> Zpk {
    let degree = z.poles.len() as i32 - z.zeros.len() as i32;
    Zpk {
        zeros: z.zeros.iter().map(|v| v * wo).collect(),
        poles: z.poles.iter().map(|v| v * wo).collect(),
        gain: z.gain * wo.powi(degree),
    }
}

fn lp2hp(z: Zpk, wo: f64) -> Zpk {
    let degree = z.poles.len() - z.zeros.len();
    let num: Complex64 = z.zeros.iter().map(|v| -v).product();
    let den: Complex64 = z.poles.iter().map(|v| -v).product();
    let mut zeros: Vec<Complex64> = z.zeros.iter().map(|v| wo / v).collect();
    zeros.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), degree));
    Zpk {
        zeros,
        poles: z.poles.iter().map(|v| wo / v).collect(),
        gain: z.gain * (num / den).re,
    }
}

fn lp2bp(z: Zpk, wo: f64, bw: f64) -> Zpk {
    let degree = z.poles.len() - z.zeros.len();
    let split = |roots: &[Complex64]| -> Vec<Complex64> {
        let scaled: Vec<Complex64> = roots.iter().map(|r| r * bw / 2.0).collect();
        let plus = scaled.iter().map(|r| r + (r * r - wo * wo).sqrt());
        let minus = scaled.iter().map(|r| r - (r * r - wo * wo).sqrt());
        plus.chain(minus).collect()
    };
    let mut zeros = split(&z.zeros);
    zeros.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), degree));
    Zpk {
        zeros,
        poles: split(&z.poles),
        gain: z.gain * bw.powi(degree as i32),
    }
}

fn bilinear(z: Zpk, fs: f64) -> Zpk {
    let fs2 = 2.0 * fs;
    let degree = z.poles.len() - z.zeros.len();
    let num: Complex64 = z.zeros.iter().map(|v| fs2 - v).product();
    let den: Complex64 = z.poles.iter().map(|v| fs2 - v).product();
    let mut zeros: Vec<Complex64> = z.zeros.iter().map(|v| (fs2 + v) / (fs2 - v)).collect();
    zeros.extend(std::iter::repeat_n(Complex64::new(-1.0, 0.0), degree));
    Zpk {
        zeros,
        poles: z.poles.iter().map(|v| (fs2 + v) / (fs2 - v)).collect(),
        gain: z.gain * (num / den).re,
    }
}

/// Groups conjugate pairs (and leftover reals) into second-order factors.
fn root_pairs(roots: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    let tol = 1e-9;
    let mut complex: Vec<Complex64> = roots.iter().copied().filter(|r| r.im > tol).collect();
    complex.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut reals: Vec<f64> = roots.iter().filter(|r| r.im.abs() <= tol).map(|r| r.re).collect();
    reals.sort_by(f64::total_cmp);

    let mut pairs: Vec<(Complex64, Complex64)> = complex.into_iter().map(|c| (c, c.conj())).collect();
    while reals.len() >= 2 {
        let hi = reals.pop().unwrap();
        let lo = reals.remove(0);
        pairs.push((Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)));
    }
    if let Some(r) = reals.pop() {
        pairs.push((Complex64::new(r, 0.0), Complex64::new(0.0, 0.0)));
    }
    pairs
}

fn zpk_to_sos(z: Zpk) -> Sos {
    let mut pole_pairs = root_pairs(&z.poles);
    // sections nearest the unit circle go last
    pole_pairs.sort_by(|a, b| (1.0 - a.0.norm()).abs().total_cmp(&(1.0 - b.0.norm()).abs()).reverse());
    let mut zero_pairs = root_pairs(&z.zeros);

    let quad = |(r1, r2): (Complex64, Complex64)| -> [f64; 3] {
        [1.0, -(r1 + r2).re, (r1 * r2).re]
    };
    let mut sections = Vec::with_capacity(pole_pairs.len());
    for pp in pole_pairs {
        let b = if zero_pairs.is_empty() {
            [1.0, 0.0, 0.0]
        } else {
            let (idx, _) = zero_pairs
                .iter()
                .enumerate()
                .map(|(i, zp)| (i, (zp.0 - pp.0).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            quad(zero_pairs.remove(idx))
        };
        let a = quad(pp);
        sections.push([b[0], b[1], b[2], a[0], a[1], a[2]]);
    }
    if let Some(first) = sections.first_mut() {
        for v in &mut first[..3] {
            *v *= z.gain;
        }
    }
    Sos { sections }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATE: f64 = 128.0;

    fn probe_gain(filter: &ZeroPhaseFilter, freq: f64, rate: f64) -> f64 {
        let n = (rate * 40.0) as usize;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * freq * i as f64 / rate).sin()).collect();
        let y = filter.apply(&x);
        let mid = &y[n / 4..3 * n / 4];
        let rms = (mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt();
        rms * 2f64.sqrt()
    }

    #[test]
    fn cheby2_matches_reference_coefficients() {
        // Digital 4th-order Chebyshev II lowpass, 40 dB, edge at 0.25 of Nyquist.
        // Response at DC must be unity and at the edge exactly -40 dB.
        let zpk = cheby2_prototype(4, 40.0);
        let sos = digital_sos(zpk, BandType::Lowpass(16.0), RATE);
        let dc = sos.response(Complex64::new(1.0, 0.0)).norm();
        assert!((dc - 1.0).abs() < 1e-9, "dc gain {dc}");
        let edge = sos.response(Complex64::from_polar(1.0, -2.0 * PI * 16.0 / RATE)).norm();
        assert!((20.0 * edge.log10() + 40.0).abs() < 1e-6, "edge gain {edge}");
    }

    #[test]
    fn butterworth_half_power_at_cutoff() {
        let sos = butterworth(4, BandType::Highpass(3.0), RATE);
        let g = sos.response(Complex64::from_polar(1.0, -2.0 * PI * 3.0 / RATE)).norm();
        assert!((g - 0.5f64.sqrt()).abs() < 1e-9);
        let bp = butterworth(2, BandType::Bandpass(8.0, 16.0), RATE);
        let centre = bp.response(Complex64::from_polar(1.0, -2.0 * PI * (128.0f64).sqrt() / RATE)).norm();
        assert!(centre > 0.99, "centre {centre}");
    }

    #[test]
    fn default_fir_tap_count() {
        assert_eq!(default_fir_taps(128.0, 3.0), 129);
        match BandpassSpec::ecg().design(RATE).unwrap() {
            ZeroPhaseFilter::Fir(t) => assert_eq!(t.len(), 129),
            _ => unreachable!(),
        }
    }

    #[test]
    fn ppg_filter_probe() {
        let f = BandpassSpec::ppg().design(RATE).unwrap();
        let pass = probe_gain(&f, 2.0, RATE);
        assert!(pass > 10f64.powf(-3.0 / 20.0), "passband gain {pass}");
        assert!(probe_gain(&f, 0.2, RATE) < 0.1);
        assert!(probe_gain(&f, 16.0, RATE) < 0.1);
    }

    #[test]
    fn ppg_filter_separates_tones() {
        let n = 4096;
        let slow: Vec<f64> = (0..n).map(|i| (2.0 * PI * 2.0 * i as f64 / RATE).sin()).collect();
        let x: Vec<f64> = (0..n)
            .map(|i| slow[i] + (2.0 * PI * 30.0 * i as f64 / RATE).sin())
            .collect();
        let y = bandpass(&x, RATE, &BandpassSpec::ppg()).unwrap();
        let corr = pearson(&y[512..n - 512], &slow[512..n - 512]);
        assert!(corr > 0.95, "correlation {corr}");
    }

    #[test]
    fn zero_in_zero_out_and_length() {
        for spec in [BandpassSpec::ppg(), BandpassSpec::ecg()] {
            let y = bandpass(&[0.0; 512], RATE, &spec).unwrap();
            assert_eq!(y.len(), 512);
            assert!(y.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn rejects_edges_at_or_above_nyquist() {
        let spec = BandpassSpec { high_hz: 64.0, ..BandpassSpec::ecg() };
        assert!(matches!(bandpass(&[1.0; 16], RATE, &spec), Err(Error::InvalidFilter(_))));
        let spec = BandpassSpec { low_hz: 10.0, high_hz: 5.0, ..BandpassSpec::ecg() };
        assert!(spec.validate(RATE).is_err());
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }
}
