use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::graph::{Grads, Graph, Var};
use super::tensor::Tensor;
use crate::{Error, Result};

/// Standard deviation of the Gaussian weight initialiser.
pub const INIT_STD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Normal(f64),
    Zeros,
    Ones,
}

/// One named parameter tensor in a network layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub shape: Vec<usize>,
    pub init: Init,
}

impl ParamSpec {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, init: Init) -> Self {
        ParamSpec { name: name.into(), shape, init }
    }

    pub fn numel(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Ordered collection of named tensors for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    names: Vec<String>,
    tensors: Vec<Tensor>,
    index: BTreeMap<String, usize>,
}

impl ParameterSet {
    /// Draws every tensor from its initialiser in layout order; `stream`
    /// separates networks that share one seed.
    pub fn init(layout: &[ParamSpec], seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let tensors = layout
            .iter()
            .map(|p| match p.init {
                Init::Zeros => Tensor::zeros(&p.shape),
                Init::Ones => Tensor::full(&p.shape, 1.0),
                Init::Normal(std) => {
                    let dist = Normal::new(0.0, std).expect("finite std");
                    Tensor {
                        shape: p.shape.clone(),
                        data: (0..p.numel()).map(|_| dist.sample(&mut rng)).collect(),
                    }
                }
            })
            .collect();
        Self::from_parts(layout.iter().map(|p| p.name.clone()).collect(), tensors)
    }

    pub fn from_parts(names: Vec<String>, tensors: Vec<Tensor>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        ParameterSet { names, tensors, index }
    }

    /// Checks that names and shapes match `layout` exactly.
    pub fn check_layout(&self, layout: &[ParamSpec]) -> Result<()> {
        if layout.len() != self.len() {
            return Err(Error::Shape(format!(
                "parameter count {} does not match layout ({})",
                self.len(),
                layout.len()
            )));
        }
        for (spec, (name, t)) in layout.iter().zip(self.iter()) {
            if spec.name != name || spec.shape != t.shape {
                return Err(Error::Shape(format!(
                    "parameter {name} {:?} does not match layout entry {} {:?}",
                    t.shape, spec.name, spec.shape
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors.iter().map(Tensor::numel).sum()
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.index.get(name).map(|&i| &self.tensors[i])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.index.get(name).map(|&i| &mut self.tensors[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.names.iter().map(String::as_str).zip(&self.tensors)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    /// Registers every tensor as a graph leaf.
    pub fn bind<'p>(&'p self, graph: &mut Graph<'p>, requires_grad: bool) -> Bound<'p> {
        Bound {
            vars: self.tensors.iter().map(|t| graph.param(t, requires_grad)).collect(),
            index: &self.index,
        }
    }
}

/// Graph handles for a bound [`ParameterSet`].
#[derive(Debug, Clone)]
pub struct Bound<'p> {
    vars: Vec<Var>,
    index: &'p BTreeMap<String, usize>,
}

impl Bound<'_> {
    pub fn var(&self, name: &str) -> Var {
        self.vars[*self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("no parameter named {name}"))]
    }

    /// Parameter gradients in layout order; parameters the objective did
    /// not reach get zeros.
    pub fn gradients(&self, grads: &mut Grads, params: &ParameterSet) -> Vec<Tensor> {
        self.vars
            .iter()
            .zip(params.tensors())
            .map(|(v, t)| grads.take(*v).unwrap_or_else(|| Tensor::zeros(&t.shape)))
            .collect()
    }
}
