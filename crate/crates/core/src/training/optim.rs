use serde::{Deserialize, Serialize};

use crate::model::Tensor;

pub const ADAM_EPS: f64 = 1e-8;

/// Adam with bias correction. Moments are stored per parameter tensor in
/// layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    pub m: Vec<Tensor>,
    pub v: Vec<Tensor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHeader {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
}

impl Adam {
    pub fn new(params: &[Tensor], betas: (f64, f64)) -> Self {
        Adam {
            beta1: betas.0,
            beta2: betas.1,
            eps: ADAM_EPS,
            step: 0,
            m: params.iter().map(|t| Tensor::zeros(&t.shape)).collect(),
            v: params.iter().map(|t| Tensor::zeros(&t.shape)).collect(),
        }
    }

    pub fn header(&self) -> AdamHeader {
        AdamHeader { beta1: self.beta1, beta2: self.beta2, eps: self.eps, step: self.step }
    }

    pub fn update(&mut self, params: &mut [Tensor], grads: &[Tensor], lr: f64) {
        assert_eq!(params.len(), grads.len());
        assert_eq!(params.len(), self.m.len());
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            for (((p, g), m), v) in p.data.iter_mut().zip(&g.data).zip(&mut m.data).zip(&mut v.data) {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_lr() {
        // bias correction makes |Δ| = lr·|g|/(|g|+eps) on the first step
        let mut p = vec![Tensor::new(vec![2], vec![1.0, -1.0]).unwrap()];
        let g = vec![Tensor::new(vec![2], vec![0.5, -3.0]).unwrap()];
        let mut opt = Adam::new(&p, (0.9, 0.999));
        opt.update(&mut p, &g, 0.01);
        assert!((p[0].data[0] - (1.0 - 0.01)).abs() < 1e-9);
        assert!((p[0].data[1] - (-1.0 + 0.01)).abs() < 1e-9);
    }

    #[test]
    fn zero_lr_is_a_no_op_on_params() {
        let mut p = vec![Tensor::new(vec![1], vec![2.0]).unwrap()];
        let mut opt = Adam::new(&p, (0.9, 0.999));
        opt.update(&mut p, &[Tensor::new(vec![1], vec![1.0]).unwrap()], 0.0);
        assert_eq!(p[0].data[0], 2.0);
        assert_eq!(opt.step, 1);
    }

    #[test]
    fn minimises_a_quadratic() {
        let mut p = vec![Tensor::new(vec![1], vec![5.0]).unwrap()];
        let mut opt = Adam::new(&p, (0.9, 0.999));
        for _ in 0..2000 {
            let g = vec![Tensor::new(vec![1], vec![2.0 * (p[0].data[0] - 1.0)]).unwrap()];
            opt.update(&mut p, &g, 0.05);
        }
        assert!((p[0].data[0] - 1.0).abs() < 1e-3);
    }
}
