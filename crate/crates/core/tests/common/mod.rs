#![allow(dead_code)]

use std::f64::consts::PI;

use ppg2ecg::model::{Discriminator, DiscriminatorConfig, Generator, GeneratorConfig, Graph, ParameterSet, Tensor};
use ppg2ecg::training::{adversarial_loss, discriminator_loss_grad, GeneratorLoss};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const RATE: f64 = 128.0;

pub fn tiny_generator() -> GeneratorConfig {
    GeneratorConfig {
        encoder_filters: vec![2, 2],
        encoder_strides: vec![2, 2],
        kernel_size: 3,
        input_length: 16,
        attention_gates: true,
    }
}

pub fn tiny_discriminator() -> DiscriminatorConfig {
    DiscriminatorConfig { filters: vec![2, 2], kernel_size: 3, stride: 1 }
}

pub fn randn(n: usize, std: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = Normal::new(0.0, std).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Adds N(0, std) noise to every scalar so no gradient is trivially zero.
pub fn jitter(p: &mut ParameterSet, std: f64, rng: &mut ChaCha8Rng) {
    for t in p.tensors_mut() {
        let n = t.numel();
        t.data.iter_mut().zip(randn(n, std, rng)).for_each(|(v, e)| *v += e);
    }
}

/// Denominator floor for relative errors of gradients that vanish
/// analytically (a bias feeding instance normalisation).
pub const REL_FLOOR: f64 = 1e-6;

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_FLOOR)
}

#[derive(Debug, Clone, Copy)]
pub struct GradCheck {
    pub generator: f64,
    pub discriminator: f64,
    pub checked: usize,
}

fn fd_worst(params: &ParameterSet, analytic: &[Tensor], loss: impl Fn(&ParameterSet) -> f64) -> (f64, usize) {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut p = params.clone();
    for (ti, grad) in analytic.iter().enumerate() {
        for j in 0..grad.numel() {
            let orig = p.tensors()[ti].data[j];
            p.tensors_mut()[ti].data[j] = orig + h;
            let up = loss(&p);
            p.tensors_mut()[ti].data[j] = orig - h;
            let down = loss(&p);
            p.tensors_mut()[ti].data[j] = orig;
            let fd = (up - down) / (2.0 * h);
            worst = worst.max(rel_err(grad.data[j], fd));
            count += 1;
        }
    }
    (worst, count)
}

/// Worst relative error between analytic and central-difference gradients
/// of a random projection of the generator output and of the
/// discriminator loss.
pub fn gradient_check(gc: &GeneratorConfig, dc: &DiscriminatorConfig, seed: u64) -> ppg2ecg::Result<GradCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = gc.input_length;
    let batch = 2;

    let gen = Generator::new(gc.clone())?;
    let mut gp = gen.init_params(seed);
    jitter(&mut gp, 0.3, &mut rng);
    let x = Tensor::new(vec![batch, 1, len], randn(batch * len, 0.5, &mut rng))?;
    let c = Tensor::new(vec![batch, 1, len], randn(batch * len, 1.0, &mut rng))?;
    let g_loss = |p: &ParameterSet| {
        let y = gen.forward(p, &x).unwrap();
        y.data.iter().zip(&c.data).map(|(a, b)| a * b).sum::<f64>()
    };
    let g_grads = {
        let mut g = Graph::new();
        let b = gp.bind(&mut g, true);
        let xv = g.input(x.clone(), false);
        let trace = gen.forward_graph(&mut g, &b, xv)?;
        let mut grads = g.backward(trace.output, c.clone())?;
        b.gradients(&mut grads, &gp)
    };
    let (g_worst, g_count) = fd_worst(&gp, &g_grads, g_loss);

    let disc = Discriminator::new(dc.clone())?;
    let mut dp = disc.init_params(seed);
    jitter(&mut dp, 0.3, &mut rng);
    let both = Tensor::new(vec![2 * batch, 1, len], randn(2 * batch * len, 0.5, &mut rng))?;
    let d_loss = |p: &ParameterSet| {
        let s = disc.forward(p, &both).unwrap();
        adversarial_loss(&s[..batch], &s[batch..], GeneratorLoss::NonSaturating).loss_d
    };
    let d_grads = {
        let mut g = Graph::new();
        let b = dp.bind(&mut g, true);
        let yv = g.input(both.clone(), false);
        let trace = disc.forward_graph(&mut g, &b, yv)?;
        let s = g.value(trace.scores).data.clone();
        let (gr, gf) = discriminator_loss_grad(&s[..batch], &s[batch..]);
        let seed = Tensor::new(vec![2 * batch, 1, 1], gr.into_iter().chain(gf).collect())?;
        let mut grads = g.backward(trace.scores, seed)?;
        b.gradients(&mut grads, &dp)
    };
    let (d_worst, d_count) = fd_worst(&dp, &d_grads, d_loss);
    Ok(GradCheck { generator: g_worst, discriminator: d_worst, checked: g_count + d_count })
}

/// Direct DFT magnitudes of bins `1..=n/2`.
pub fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (1..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let a = -2.0 * PI * (k * t % n) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            (re * re + im * im).sqrt()
        })
        .collect()
}

/// Scalar-loop spectral L1 loss over `[batch, 1, len]` tensors.
pub fn freq_loss_oracle(fake: &Tensor, real: &Tensor) -> f64 {
    let (b, _, l) = (fake.shape[0], fake.shape[1], fake.shape[2]);
    let mut total = 0.0;
    for i in 0..b {
        let f = dft_magnitudes(&fake.data[i * l..(i + 1) * l]);
        let r = dft_magnitudes(&real.data[i * l..(i + 1) * l]);
        for k in 0..f.len() {
            total += (f[k] - r[k]).abs();
        }
    }
    total / b as f64
}

/// Scalar-loop `(loss_d, loss_g)` with non-saturating generator term.
pub fn adversarial_oracle(real: &[f64], fake: &[f64]) -> (f64, f64) {
    let clamp = |s: f64| s.clamp(1e-7, 1.0 - 1e-7);
    let mut lr = 0.0;
    for &s in real {
        lr += clamp(s).ln();
    }
    let mut lf = 0.0;
    let mut lg = 0.0;
    for &s in fake {
        lf += (1.0 - clamp(s)).ln();
        lg += clamp(s).ln();
    }
    (-lr / real.len() as f64 - lf / fake.len() as f64, -lg / fake.len() as f64)
}

/// ECG-like beat train: Q, R, S deflections plus P and T waves.
pub fn qrs_train(bpm: f64, secs: f64, phase: f64) -> Vec<f64> {
    let n = (secs * RATE).round() as usize;
    let rr = 60.0 / bpm;
    let t_off = (0.4 * rr).min(0.28);
    let waves = [
        (-0.16_f64.min(0.3 * rr), 0.015, 0.12), // P
        (-0.03, 0.008, -0.15),                   // Q
        (0.0, 0.01, 1.0),                        // R
        (0.03, 0.008, -0.25),                    // S
        (t_off, 0.04, 0.3),                      // T
    ];
    let mut x = vec![0.0; n];
    let mut beat = -1.0 + phase * rr;
    while beat < secs + 1.0 {
        for (i, v) in x.iter_mut().enumerate() {
            let t = i as f64 / RATE - beat;
            if t.abs() > 0.5 {
                continue;
            }
            for &(off, w, a) in &waves {
                *v += a * (-0.5 * ((t - off) / w).powi(2)).exp();
            }
        }
        beat += rr;
    }
    x
}

/// Raised-cosine pulses lasting 60% of each beat, zero in between.
pub fn raised_cosine_train(bpm: f64, secs: f64, phase: f64) -> Vec<f64> {
    let n = (secs * RATE).round() as usize;
    let rr = 60.0 / bpm;
    let width = 0.6 * rr;
    (0..n)
        .map(|i| {
            let t = (i as f64 / RATE - phase * rr).rem_euclid(rr);
            if t < width {
                0.5 * (1.0 - (2.0 * PI * t / width).cos())
            } else {
                0.0
            }
        })
        .collect()
}

/// Gaussian systolic pulses with a dicrotic bump.
pub fn ppg_train(bpm: f64, secs: f64, phase: f64) -> Vec<f64> {
    let n = (secs * RATE).round() as usize;
    let rr = 60.0 / bpm;
    let mut x = vec![0.0; n];
    let mut beat = -1.0 + phase * rr;
    while beat < secs + 1.0 {
        for (i, v) in x.iter_mut().enumerate() {
            let t = i as f64 / RATE - beat;
            *v += (-0.5 * (t / (0.12 * rr.min(1.0))).powi(2)).exp()
                + 0.3 * (-0.5 * ((t - 0.35 * rr) / (0.08 * rr.min(1.0))).powi(2)).exp();
        }
        beat += rr;
    }
    x
}

/// Adds white Gaussian noise at the given signal-to-noise ratio in dB,
/// with signal power taken about the mean.
pub fn add_noise(x: &[f64], snr_db: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let power = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
    let std = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    x.iter().zip(randn(x.len(), std, rng)).map(|(a, b)| a + b).collect()
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}
