use serde::{Deserialize, Serialize};

use super::graph::{Graph, Var};
use super::params::{Bound, Init, ParamSpec, ParameterSet, INIT_STD};
use super::tensor::Tensor;
use crate::{Error, Result};

/// Slope of the leaky rectifier used in the encoder and the discriminator.
pub const LEAKY_SLOPE: f64 = 0.2;

/// Attention U-Net layout. The decoder mirrors the encoder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub encoder_filters: Vec<usize>,
    /// Each stride is 1 or 2; stride-2 stages are mirrored by ×2 upsampling.
    pub encoder_strides: Vec<usize>,
    pub kernel_size: usize,
    pub input_length: usize,
    pub attention_gates: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            encoder_filters: vec![64, 128, 256, 512, 512, 512],
            encoder_strides: vec![2, 2, 2, 1, 1, 1],
            kernel_size: 16,
            input_length: 512,
            attention_gates: true,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.encoder_filters.len();
        if n == 0 || n != self.encoder_strides.len() {
            return Err(Error::Config("encoder filters and strides must be non-empty and equal length".into()));
        }
        if self.encoder_filters.contains(&0) || self.kernel_size == 0 {
            return Err(Error::Config("filters and kernel size must be positive".into()));
        }
        if self.encoder_strides.iter().any(|s| !matches!(s, 1 | 2)) {
            return Err(Error::Config("encoder strides must be 1 or 2".into()));
        }
        if self.input_length == 0 || !self.input_length.is_multiple_of(self.length_multiple()) {
            return Err(Error::Config(format!(
                "input length {} is not a multiple of {}",
                self.input_length,
                self.length_multiple()
            )));
        }
        Ok(())
    }

    /// Input lengths must be divisible by this (the product of strides).
    pub fn length_multiple(&self) -> usize {
        self.encoder_strides.iter().product()
    }

    /// Output length of each encoder stage for an input of `len` samples.
    pub fn encoder_lengths(&self, len: usize) -> Vec<usize> {
        self.encoder_strides
            .iter()
            .scan(len, |l, s| {
                *l = l.div_ceil(*s);
                Some(*l)
            })
            .collect()
    }

    fn gate_width(channels: usize) -> usize {
        (channels / 2).max(1)
    }

    pub fn layout(&self) -> Vec<ParamSpec> {
        let k = self.kernel_size;
        let f = &self.encoder_filters;
        let n = f.len();
        let mut out = Vec::new();
        let conv = |out: &mut Vec<ParamSpec>, prefix: &str, cout: usize, cin: usize, kernel: usize| {
            out.push(ParamSpec::new(format!("{prefix}.w"), vec![cout, cin, kernel], Init::Normal(INIT_STD)));
            out.push(ParamSpec::new(format!("{prefix}.b"), vec![cout], Init::Zeros));
        };
        let norm = |out: &mut Vec<ParamSpec>, prefix: &str, ch: usize| {
            out.push(ParamSpec::new(format!("{prefix}.g"), vec![ch], Init::Ones));
            out.push(ParamSpec::new(format!("{prefix}.b"), vec![ch], Init::Zeros));
        };

        let mut cin = 1;
        for (i, &c) in f.iter().enumerate() {
            conv(&mut out, &format!("enc{}.conv", i + 1), c, cin, k);
            norm(&mut out, &format!("enc{}.norm", i + 1), c);
            cin = c;
        }
        for j in (2..=n).rev() {
            let cin = if j == n { f[n - 1] } else { 2 * f[j - 1] };
            let cout = f[j - 2];
            conv(&mut out, &format!("dec{j}.conv"), cout, cin, k);
            norm(&mut out, &format!("dec{j}.norm"), cout);
            if self.attention_gates {
                let inter = Self::gate_width(cout);
                let g = format!("gate{}", j - 1);
                conv(&mut out, &format!("{g}.skip"), inter, cout, 1);
                conv(&mut out, &format!("{g}.gating"), inter, cout, 1);
                conv(&mut out, &format!("{g}.psi"), 1, inter, 1);
            }
        }
        let cin = if n == 1 { f[0] } else { 2 * f[0] };
        conv(&mut out, "out.conv", 1, cin, k);
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.layout().iter().map(ParamSpec::numel).sum()
    }
}

/// Nodes of one generator evaluation.
#[derive(Debug, Clone)]
pub struct GeneratorTrace {
    pub output: Var,
    pub encoder: Vec<Var>,
    /// Attention coefficients per gated skip, shallowest first.
    pub attention: Vec<Var>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub config: GeneratorConfig,
}

impl Generator {
    pub fn new(config: GeneratorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Generator { config })
    }

    pub fn init_params(&self, seed: u64) -> ParameterSet {
        ParameterSet::init(&self.config.layout(), seed, 1)
    }

    fn check_input(&self, shape: &[usize]) -> Result<()> {
        let m = self.config.length_multiple();
        if shape.len() != 3 || shape[1] != 1 || shape[2] == 0 || !shape[2].is_multiple_of(m) {
            return Err(Error::Shape(format!(
                "generator expects [batch, 1, length] with length a multiple of {m}, got {shape:?}"
            )));
        }
        Ok(())
    }

    pub fn forward_graph<'p>(&self, g: &mut Graph<'p>, p: &Bound<'p>, x: Var) -> Result<GeneratorTrace> {
        self.check_input(&g.value(x).shape)?;
        let f = &self.config.encoder_filters;
        let s = &self.config.encoder_strides;
        let n = f.len();

        let mut encoder = Vec::with_capacity(n);
        let mut h = x;
        for i in 1..=n {
            let c = g.conv1d(h, p.var(&format!("enc{i}.conv.w")), p.var(&format!("enc{i}.conv.b")), s[i - 1])?;
            let c = g.instance_norm(c, p.var(&format!("enc{i}.norm.g")), p.var(&format!("enc{i}.norm.b")))?;
            h = g.leaky_relu(c, LEAKY_SLOPE);
            encoder.push(h);
        }

        let mut attention = Vec::new();
        let mut d = h;
        for j in (2..=n).rev() {
            let u = if s[j - 1] == 2 { g.upsample2(d) } else { d };
            let u = g.conv1d(u, p.var(&format!("dec{j}.conv.w")), p.var(&format!("dec{j}.conv.b")), 1)?;
            let u = g.instance_norm(u, p.var(&format!("dec{j}.norm.g")), p.var(&format!("dec{j}.norm.b")))?;
            let u = g.relu(u);
            let skip = encoder[j - 2];
            let skip = if self.config.attention_gates {
                let (gated, alpha) = attention_gate(g, p, &format!("gate{}", j - 1), skip, u)?;
                attention.push(alpha);
                gated
            } else {
                skip
            };
            d = g.concat(u, skip)?;
        }
        let u = if s[0] == 2 { g.upsample2(d) } else { d };
        let out = g.conv1d(u, p.var("out.conv.w"), p.var("out.conv.b"), 1)?;
        let output = g.tanh(out);
        attention.reverse();
        Ok(GeneratorTrace { output, encoder, attention })
    }

    /// Inference without gradient tracking.
    pub fn forward(&self, params: &ParameterSet, x: &Tensor) -> Result<Tensor> {
        let mut g = Graph::new();
        let p = params.bind(&mut g, false);
        let xv = g.input(x.clone(), false);
        let trace = self.forward_graph(&mut g, &p, xv)?;
        Ok(g.value(trace.output).clone())
    }
}

/// Additive attention over a skip connection.
///
/// `alpha = sigmoid(psi(relu(W_s·skip + W_g·gating)))` with 1-wide
/// convolutions; the result is `skip ⊙ alpha`. Returns `(gated, alpha)`.
pub fn attention_gate<'p>(
    g: &mut Graph<'p>,
    p: &Bound<'p>,
    prefix: &str,
    skip: Var,
    gating: Var,
) -> Result<(Var, Var)> {
    let (bs, _, ls) = g.value(skip).dims3();
    let (bg, _, lg) = g.value(gating).dims3();
    if (bs, ls) != (bg, lg) {
        return Err(Error::Shape(format!(
            "gating signal [{bg}, _, {lg}] is not aligned with skip [{bs}, _, {ls}]"
        )));
    }
    let theta = g.conv1d(skip, p.var(&format!("{prefix}.skip.w")), p.var(&format!("{prefix}.skip.b")), 1)?;
    let phi = g.conv1d(gating, p.var(&format!("{prefix}.gating.w")), p.var(&format!("{prefix}.gating.b")), 1)?;
    let q = g.add(theta, phi)?;
    let q = g.relu(q);
    let psi = g.conv1d(q, p.var(&format!("{prefix}.psi.w")), p.var(&format!("{prefix}.psi.b")), 1)?;
    let alpha = g.sigmoid(psi);
    Ok((g.gate(skip, alpha)?, alpha))
}
