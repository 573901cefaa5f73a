use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Moduli of DFT bins `1..=N/2` (DC excluded, Nyquist included for even N).
///
/// The forward transform is unnormalised: a unit sine sitting exactly on bin
/// `k` has modulus `N / 2` there.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSpectrum(pub Vec<f64>);

impl MagnitudeSpectrum {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Cached forward/inverse plans for one transform length.
#[derive(Clone)]
pub struct SpectrumPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectrumPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectrumPlan").field("len", &self.len).finish()
    }
}

impl SpectrumPlan {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        SpectrumPlan {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_bins(&self) -> usize {
        self.len / 2
    }

    /// Full complex spectrum of a real signal.
    pub fn transform(&self, x: &[f64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.len, "signal length does not match plan");
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn magnitudes(&self, x: &[f64]) -> MagnitudeSpectrum {
        let spec = self.transform(x);
        MagnitudeSpectrum(spec[1..=self.num_bins()].iter().map(|c| c.norm()).collect())
    }

    /// Unnormalised inverse transform, in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

pub fn magnitude_spectrum(x: &[f64]) -> MagnitudeSpectrum {
    SpectrumPlan::new(x.len()).magnitudes(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Direct O(N^2) DFT modulus.
    fn dft_modulus(x: &[f64], k: usize) -> f64 {
        let n = x.len() as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in x.iter().enumerate() {
            let ang = -2.0 * PI * k as f64 * t as f64 / n;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re * re + im * im).sqrt()
    }

    #[test]
    fn bin_eight_sine() {
        let x: Vec<f64> = (0..512).map(|t| (2.0 * PI * 8.0 * t as f64 / 512.0).sin()).collect();
        let s = magnitude_spectrum(&x);
        assert_eq!(s.len(), 256);
        for (i, m) in s.as_slice().iter().enumerate() {
            let k = i + 1;
            let oracle = dft_modulus(&x, k);
            assert!((m - oracle).abs() < 1e-9);
            if k == 8 {
                assert!((m - 256.0).abs() < 1e-9);
            } else {
                assert!(*m < 1e-9, "bin {k} = {m}");
            }
        }
    }

    #[test]
    fn zero_and_constant_have_empty_spectrum() {
        assert!(magnitude_spectrum(&[0.0; 64]).as_slice().iter().all(|m| *m == 0.0));
        assert!(magnitude_spectrum(&[3.5; 64]).as_slice().iter().all(|m| *m < 1e-12));
    }

    proptest! {
        #[test]
        fn circular_shift_invariance(x in prop::collection::vec(-1.0f64..1.0, 64), s in 0usize..64) {
            let mut r = x.clone();
            r.rotate_left(s);
            let a = magnitude_spectrum(&x);
            let b = magnitude_spectrum(&r);
            for (u, v) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((u - v).abs() <= 1e-6 * u.abs().max(1e-9) + 1e-12);
            }
        }
    }
}
