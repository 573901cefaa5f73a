use crate::{Error, Result};

/// Dense row-major f64 tensor.
///
/// Activations are always `[batch, channels, length]`; parameters use
/// whatever shape their layer needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::Shape(format!(
                "shape {shape:?} needs {n} elements, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn full(shape: &[usize], value: f64) -> Self {
        Tensor {
            shape: shape.to_vec(),
            data: vec![value; shape.iter().product()],
        }
    }

    /// Stacks equal-length signals into a `[batch, 1, length]` tensor.
    pub fn from_signals<'a>(signals: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut data = Vec::new();
        let mut len = None;
        let mut batch = 0;
        for s in signals {
            match len {
                None => len = Some(s.len()),
                Some(l) if l != s.len() => {
                    return Err(Error::Shape(format!("signal lengths differ: {l} vs {}", s.len())))
                }
                _ => {}
            }
            data.extend_from_slice(s);
            batch += 1;
        }
        let len = len.ok_or_else(|| Error::Shape("empty batch".into()))?;
        Ok(Tensor { shape: vec![batch, 1, len], data })
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    /// `(batch, channels, length)` of an activation tensor.
    pub fn dims3(&self) -> (usize, usize, usize) {
        assert_eq!(self.shape.len(), 3, "expected a 3-d tensor, got {:?}", self.shape);
        (self.shape[0], self.shape[1], self.shape[2])
    }

    /// Channel-0 signal of batch item `b`.
    pub fn signal(&self, b: usize) -> &[f64] {
        let (_, c, l) = self.dims3();
        &self.data[b * c * l..b * c * l + l]
    }

    pub fn item(&self, b: usize) -> &[f64] {
        let (_, c, l) = self.dims3();
        &self.data[b * c * l..(b + 1) * c * l]
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        debug_assert_eq!(self.shape, other.shape);
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
    }

    pub fn scale(&mut self, k: f64) {
        self.data.iter_mut().for_each(|v| *v *= k);
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
