use serde::{Deserialize, Serialize};

use super::generator::LEAKY_SLOPE;
use super::graph::{Graph, Var};
use super::params::{Bound, Init, ParamSpec, ParameterSet, INIT_STD};
use super::tensor::Tensor;
use crate::{Error, Result};

/// Stack of same-padded convolutions, a one-channel head convolution and
/// global average pooling to one logit per item.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscriminatorConfig {
    pub filters: Vec<usize>,
    pub kernel_size: usize,
    pub stride: usize,
}

impl Default for DiscriminatorConfig {
    fn default() -> Self {
        DiscriminatorConfig {
            filters: vec![32, 64, 128, 256, 512],
            kernel_size: 16,
            stride: 1,
        }
    }
}

impl DiscriminatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filters.is_empty() || self.filters.contains(&0) || self.kernel_size == 0 || self.stride == 0 {
            return Err(Error::Config("discriminator filters, kernel and stride must be positive".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> Vec<ParamSpec> {
        let k = self.kernel_size;
        let mut out = Vec::new();
        let mut cin = 1;
        for (i, &c) in self.filters.iter().enumerate() {
            out.push(ParamSpec::new(format!("conv{}.w", i + 1), vec![c, cin, k], Init::Normal(INIT_STD)));
            out.push(ParamSpec::new(format!("conv{}.b", i + 1), vec![c], Init::Zeros));
            cin = c;
        }
        out.push(ParamSpec::new("head.w", vec![1, cin, k], Init::Normal(INIT_STD)));
        out.push(ParamSpec::new("head.b", vec![1], Init::Zeros));
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.layout().iter().map(ParamSpec::numel).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DiscriminatorTrace {
    pub logits: Var,
    /// `sigmoid(logits)`, shape `[batch, 1, 1]`.
    pub scores: Var,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    pub config: DiscriminatorConfig,
}

impl Discriminator {
    pub fn new(config: DiscriminatorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Discriminator { config })
    }

    pub fn init_params(&self, seed: u64) -> ParameterSet {
        ParameterSet::init(&self.config.layout(), seed, 2)
    }

    pub fn forward_graph<'p>(&self, g: &mut Graph<'p>, p: &Bound<'p>, y: Var) -> Result<DiscriminatorTrace> {
        let shape = &g.value(y).shape;
        if shape.len() != 3 || shape[1] != 1 || shape[2] == 0 {
            return Err(Error::Shape(format!("discriminator expects [batch, 1, length], got {shape:?}")));
        }
        let mut h = y;
        for i in 1..=self.config.filters.len() {
            let c = g.conv1d(h, p.var(&format!("conv{i}.w")), p.var(&format!("conv{i}.b")), self.config.stride)?;
            h = g.leaky_relu(c, LEAKY_SLOPE);
        }
        let head = g.conv1d(h, p.var("head.w"), p.var("head.b"), 1)?;
        let logits = g.mean_length(head);
        let scores = g.sigmoid(logits);
        Ok(DiscriminatorTrace { logits, scores })
    }

    /// Scores in `(0, 1)`, one per batch item.
    pub fn forward(&self, params: &ParameterSet, y: &Tensor) -> Result<Vec<f64>> {
        let mut g = Graph::new();
        let p = params.bind(&mut g, false);
        let yv = g.input(y.clone(), false);
        let trace = self.forward_graph(&mut g, &p, yv)?;
        Ok(g.value(trace.scores).data.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Discriminator {
        Discriminator::new(DiscriminatorConfig { filters: vec![4, 8], kernel_size: 7, stride: 1 }).unwrap()
    }

    #[test]
    fn scores_in_open_unit_interval() {
        let d = small();
        let p = d.init_params(1);
        let x = Tensor::new(vec![2, 1, 32], (0..64).map(|i| (i as f64 * 0.9).sin()).collect()).unwrap();
        let s = d.forward(&p, &x).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|v| *v > 0.0 && *v < 1.0));
        let one = d.forward(&p, &Tensor::new(vec![1, 1, 32], x.item(1).to_vec()).unwrap()).unwrap();
        assert_eq!(one[0], s[1]);
    }

    #[test]
    fn zero_head_gives_one_half() {
        let d = small();
        let mut p = d.init_params(1);
        p.get_mut("head.w").unwrap().data.fill(0.0);
        let s = d.forward(&p, &Tensor::zeros(&[3, 1, 32])).unwrap();
        assert!(s.iter().all(|v| *v == 0.5));
    }

    #[test]
    fn closed_form_parameter_count() {
        // Σ (k·cin·cout + cout) over the stack plus the head.
        let c = DiscriminatorConfig::default();
        let expected = (16 * 32 + 32)
            + (16 * 32 * 64 + 64)
            + (16 * 64 * 128 + 128)
            + (16 * 128 * 256 + 256)
            + (16 * 256 * 512 + 512)
            + (16 * 512 + 1);
        assert_eq!(c.parameter_count(), expected);
    }
}
