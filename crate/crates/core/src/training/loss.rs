use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::Tensor;
use crate::signal::SpectrumPlan;
use crate::{Error, Result};

/// Scores are clamped to `[SCORE_EPS, 1 - SCORE_EPS]` before logarithms.
pub const SCORE_EPS: f64 = 1e-7;

/// Generator side of the adversarial objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorLoss {
    /// `-mean(log D(G(x)))`.
    #[default]
    NonSaturating,
    /// `mean(log(1 - D(G(x))))`.
    Minimax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialLoss {
    pub loss_d: f64,
    pub loss_g: f64,
    /// `-mean(log d_real)`.
    pub real_term: f64,
    /// `-mean(log(1 - d_fake))`.
    pub fake_term: f64,
    /// Number of scores that hit the clamp.
    pub clamped: usize,
}

fn clamp(s: f64, clamped: &mut usize) -> f64 {
    if s < SCORE_EPS {
        *clamped += 1;
        SCORE_EPS
    } else if s > 1.0 - SCORE_EPS {
        *clamped += 1;
        1.0 - SCORE_EPS
    } else {
        s
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

pub fn adversarial_loss(d_real: &[f64], d_fake: &[f64], variant: GeneratorLoss) -> AdversarialLoss {
    assert!(!d_real.is_empty() && !d_fake.is_empty(), "empty score batch");
    let mut clamped = 0;
    let real: Vec<f64> = d_real.iter().map(|&s| clamp(s, &mut clamped)).collect();
    let fake: Vec<f64> = d_fake.iter().map(|&s| clamp(s, &mut clamped)).collect();
    let real_term = -mean(real.iter().map(|s| s.ln()));
    let fake_term = -mean(fake.iter().map(|s| (1.0 - s).ln()));
    let loss_g = match variant {
        GeneratorLoss::NonSaturating => -mean(fake.iter().map(|s| s.ln())),
        GeneratorLoss::Minimax => -fake_term,
    };
    AdversarialLoss { loss_d: real_term + fake_term, loss_g, real_term, fake_term, clamped }
}

/// Generator term alone, with the number of clamped scores.
pub fn generator_adversarial_loss(d_fake: &[f64], variant: GeneratorLoss) -> (f64, usize) {
    assert!(!d_fake.is_empty(), "empty score batch");
    let mut clamped = 0;
    let fake: Vec<f64> = d_fake.iter().map(|&s| clamp(s, &mut clamped)).collect();
    let loss = match variant {
        GeneratorLoss::NonSaturating => -mean(fake.iter().map(|s| s.ln())),
        GeneratorLoss::Minimax => mean(fake.iter().map(|s| (1.0 - s).ln())),
    };
    (loss, clamped)
}

/// Gradients of `loss_d` w.r.t. the real and fake scores. Clamped scores
/// get zero gradient.
pub fn discriminator_loss_grad(d_real: &[f64], d_fake: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let nr = d_real.len() as f64;
    let nf = d_fake.len() as f64;
    let inside = |s: f64| (SCORE_EPS..=1.0 - SCORE_EPS).contains(&s);
    let gr = d_real.iter().map(|&s| if inside(s) { -1.0 / (nr * s) } else { 0.0 }).collect();
    let gf = d_fake.iter().map(|&s| if inside(s) { 1.0 / (nf * (1.0 - s)) } else { 0.0 }).collect();
    (gr, gf)
}

/// Gradient of `loss_g` w.r.t. the fake scores.
pub fn generator_loss_grad(d_fake: &[f64], variant: GeneratorLoss) -> Vec<f64> {
    let n = d_fake.len() as f64;
    d_fake
        .iter()
        .map(|&s| {
            if !(SCORE_EPS..=1.0 - SCORE_EPS).contains(&s) {
                return 0.0;
            }
            match variant {
                GeneratorLoss::NonSaturating => -1.0 / (n * s),
                GeneratorLoss::Minimax => -1.0 / (n * (1.0 - s)),
            }
        })
        .collect()
}

/// Spectral L1 loss between batches of `[batch, 1, length]` signals with a
/// cached transform plan.
#[derive(Debug, Clone)]
pub struct FreqLoss {
    plan: SpectrumPlan,
}

impl FreqLoss {
    pub fn new(len: usize) -> Self {
        FreqLoss { plan: SpectrumPlan::new(len) }
    }

    fn check(&self, fake: &Tensor, real: &Tensor) -> Result<(usize, usize)> {
        if fake.shape != real.shape || fake.shape.len() != 3 || fake.shape[1] != 1 || fake.shape[0] == 0 {
            return Err(Error::Shape(format!(
                "freq loss needs equal [batch, 1, length] shapes, got {:?} and {:?}",
                fake.shape, real.shape
            )));
        }
        if fake.shape[2] != self.plan.len() {
            return Err(Error::Shape(format!(
                "freq loss planned for length {}, got {}",
                self.plan.len(),
                fake.shape[2]
            )));
        }
        Ok((fake.shape[0], fake.shape[2]))
    }

    /// Mean over the batch of `Σ_k ||F(fake)_k| - |F(real)_k||`, `k = 1..=L/2`.
    pub fn loss(&self, fake: &Tensor, real: &Tensor) -> Result<f64> {
        let (b, _) = self.check(fake, real)?;
        let mut total = 0.0;
        for i in 0..b {
            let f = self.plan.magnitudes(fake.signal(i));
            let r = self.plan.magnitudes(real.signal(i));
            total += f.0.iter().zip(&r.0).map(|(a, b)| (a - b).abs()).sum::<f64>();
        }
        Ok(total / b as f64)
    }

    /// Loss and its (sub)gradient w.r.t. `fake`. Bins where the fake
    /// magnitude is zero contribute no gradient.
    pub fn loss_and_grad(&self, fake: &Tensor, real: &Tensor) -> Result<(f64, Tensor)> {
        let (b, len) = self.check(fake, real)?;
        let bins = self.plan.num_bins();
        let mut grad = Tensor::zeros(&fake.shape);
        let mut total = 0.0;
        for i in 0..b {
            let ff = self.plan.transform(fake.signal(i));
            let rm = self.plan.magnitudes(real.signal(i));
            let mut v = vec![Complex64::new(0.0, 0.0); len];
            for k in 1..=bins {
                let m = ff[k].norm();
                let d = m - rm.0[k - 1];
                total += d.abs();
                if m > 0.0 && d != 0.0 {
                    v[k] = ff[k] * (d.signum() / (m * b as f64));
                }
            }
            self.plan.inverse_in_place(&mut v);
            for (g, c) in grad.data[i * len..(i + 1) * len].iter_mut().zip(&v) {
                *g = c.re;
            }
        }
        Ok((total / b as f64, grad))
    }
}

pub fn freq_loss(fake: &Tensor, real: &Tensor) -> Result<f64> {
    let len = fake.shape.last().copied().unwrap_or(0);
    FreqLoss::new(len).loss(fake, real)
}

pub fn combined_generator_loss(adv_g: f64, lf: f64, lambda_freq: f64) -> f64 {
    adv_g + lambda_freq * lf
}

/// Loss components of one training iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub iteration: u64,
    pub loss_d: f64,
    pub real_term: f64,
    pub fake_term: f64,
    pub loss_g_adv: f64,
    pub loss_freq: f64,
    pub loss_g: f64,
    pub lr_g: f64,
    pub lr_d: f64,
    pub d_updated: bool,
    pub clamped: usize,
}
