//! Reverse-mode differentiation over `[batch, channels, length]` tensors.
//!
//! A [`Graph`] is a tape: every op appends a node holding its output and
//! whatever it needs for the backward pass. Parameters are borrowed, so
//! building a graph never copies weights. Batch items never interact inside
//! an op, and per-item parameter gradients are accumulated in batch order,
//! which keeps results deterministic.

use std::borrow::Cow;

use super::tensor::Tensor;
use crate::{Error, Result};

/// Handle to a node of a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    Conv1d { x: Var, w: Var, b: Var, stride: usize, pad_left: usize },
    LeakyRelu { x: Var, slope: f64 },
    Tanh { x: Var },
    Sigmoid { x: Var },
    InstanceNorm { x: Var, gamma: Var, beta: Var, xhat: Vec<f64>, inv_std: Vec<f64> },
    Upsample2 { x: Var },
    Concat { a: Var, b: Var },
    Gate { s: Var, alpha: Var },
    Add { a: Var, b: Var },
    MeanLength { x: Var },
}

#[derive(Debug)]
struct Node<'p> {
    value: Cow<'p, Tensor>,
    op: Op,
    needs_grad: bool,
}

pub const INSTANCE_NORM_EPS: f64 = 1e-5;

#[derive(Debug, Default)]
pub struct Graph<'p> {
    nodes: Vec<Node<'p>>,
}

/// Gradients produced by [`Graph::backward`], indexed by [`Var`].
#[derive(Debug)]
pub struct Grads {
    grads: Vec<Option<Tensor>>,
}

impl Grads {
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads[v.0].as_ref()
    }

    pub fn take(&mut self, v: Var) -> Option<Tensor> {
        self.grads[v.0].take()
    }
}

/// Output length and left padding of a "same"-padded strided convolution.
/// Even kernels pad one more sample on the right than on the left.
pub fn same_padding(len: usize, kernel: usize, stride: usize) -> (usize, usize) {
    let out = len.div_ceil(stride);
    let total = ((out - 1) * stride + kernel).saturating_sub(len);
    (out, total / 2)
}

impl<'p> Graph<'p> {
    pub fn new() -> Self {
        Graph { nodes: Vec::new() }
    }

    fn push(&mut self, value: Cow<'p, Tensor>, op: Op, needs_grad: bool) -> Var {
        self.nodes.push(Node { value, op, needs_grad });
        Var(self.nodes.len() - 1)
    }

    pub fn input(&mut self, t: Tensor, requires_grad: bool) -> Var {
        self.push(Cow::Owned(t), Op::Leaf, requires_grad)
    }

    pub fn param(&mut self, t: &'p Tensor, requires_grad: bool) -> Var {
        self.push(Cow::Borrowed(t), Op::Leaf, requires_grad)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn ng(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].needs_grad)
    }

    /// "Same"-padded 1-d convolution; `w` is `[out, in, kernel]`, `b` is `[out]`.
    pub fn conv1d(&mut self, x: Var, w: Var, b: Var, stride: usize) -> Result<Var> {
        let (batch, cin, len) = self.value(x).dims3();
        let ws = &self.value(w).shape;
        if ws.len() != 3 || ws[1] != cin {
            return Err(Error::Shape(format!(
                "conv weight {ws:?} does not accept {cin} input channels"
            )));
        }
        let (cout, kernel) = (ws[0], ws[2]);
        if self.value(b).shape != [cout] {
            return Err(Error::Shape(format!("conv bias must have shape [{cout}]")));
        }
        let (lout, pad_left) = same_padding(len, kernel, stride);
        let xv = self.value(x);
        let wv = &self.value(w).data;
        let bv = &self.value(b).data;
        let rows = cin * kernel;
        let mut out = vec![0.0; batch * cout * lout];
        let mut cols = vec![0.0; rows * lout];
        for bi in 0..batch {
            im2col(xv.item(bi), cin, len, kernel, stride, pad_left, lout, &mut cols);
            let o = &mut out[bi * cout * lout..(bi + 1) * cout * lout];
            for (co, row) in o.chunks_exact_mut(lout).enumerate() {
                row.fill(bv[co]);
            }
            gemm(cout, rows, lout, wv, (rows, 1), &cols, (lout, 1), o, 1.0);
        }
        let ng = self.ng(&[x, w, b]);
        let value = Tensor { shape: vec![batch, cout, lout], data: out };
        Ok(self.push(Cow::Owned(value), Op::Conv1d { x, w, b, stride, pad_left }, ng))
    }

    fn map(&mut self, x: Var, op: Op, f: impl Fn(f64) -> f64) -> Var {
        let xv = self.value(x);
        let value = Tensor {
            shape: xv.shape.clone(),
            data: xv.data.iter().map(|&v| f(v)).collect(),
        };
        let ng = self.ng(&[x]);
        self.push(Cow::Owned(value), op, ng)
    }

    pub fn leaky_relu(&mut self, x: Var, slope: f64) -> Var {
        self.map(x, Op::LeakyRelu { x, slope }, |v| if v > 0.0 { v } else { slope * v })
    }

    pub fn relu(&mut self, x: Var) -> Var {
        self.leaky_relu(x, 0.0)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.map(x, Op::Tanh { x }, f64::tanh)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.map(x, Op::Sigmoid { x }, sigmoid)
    }

    /// Per-item, per-channel normalisation over length with affine `gamma`, `beta` (`[channels]`).
    pub fn instance_norm(&mut self, x: Var, gamma: Var, beta: Var) -> Result<Var> {
        let (batch, ch, len) = self.value(x).dims3();
        if self.value(gamma).shape != [ch] || self.value(beta).shape != [ch] {
            return Err(Error::Shape(format!("instance norm affine terms must have shape [{ch}]")));
        }
        let xv = &self.value(x).data;
        let g = &self.value(gamma).data;
        let bt = &self.value(beta).data;
        let mut xhat = vec![0.0; xv.len()];
        let mut inv_std = vec![0.0; batch * ch];
        let mut out = vec![0.0; xv.len()];
        for (row, ((src, dst), xh)) in xv
            .chunks_exact(len)
            .zip(out.chunks_exact_mut(len))
            .zip(xhat.chunks_exact_mut(len))
            .enumerate()
        {
            let c = row % ch;
            let mean = src.iter().sum::<f64>() / len as f64;
            let var = src.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len as f64;
            let is = 1.0 / (var + INSTANCE_NORM_EPS).sqrt();
            inv_std[row] = is;
            for ((s, d), h) in src.iter().zip(dst.iter_mut()).zip(xh.iter_mut()) {
                *h = (s - mean) * is;
                *d = g[c] * *h + bt[c];
            }
        }
        let ng = self.ng(&[x, gamma, beta]);
        let value = Tensor { shape: vec![batch, ch, len], data: out };
        Ok(self.push(Cow::Owned(value), Op::InstanceNorm { x, gamma, beta, xhat, inv_std }, ng))
    }

    /// Nearest-neighbour ×2 along length.
    pub fn upsample2(&mut self, x: Var) -> Var {
        let (batch, ch, len) = self.value(x).dims3();
        let data = self.value(x).data.iter().flat_map(|&v| [v, v]).collect();
        let ng = self.ng(&[x]);
        let value = Tensor { shape: vec![batch, ch, 2 * len], data };
        self.push(Cow::Owned(value), Op::Upsample2 { x }, ng)
    }

    /// Channel concatenation `[a; b]`.
    pub fn concat(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ba, ca, la) = self.value(a).dims3();
        let (bb, cb, lb) = self.value(b).dims3();
        if ba != bb || la != lb {
            return Err(Error::Shape(format!(
                "cannot concatenate [{ba}, {ca}, {la}] with [{bb}, {cb}, {lb}]"
            )));
        }
        let (av, bv) = (&self.value(a).data, &self.value(b).data);
        let mut data = Vec::with_capacity(av.len() + bv.len());
        for i in 0..ba {
            data.extend_from_slice(&av[i * ca * la..(i + 1) * ca * la]);
            data.extend_from_slice(&bv[i * cb * lb..(i + 1) * cb * lb]);
        }
        let ng = self.ng(&[a, b]);
        let value = Tensor { shape: vec![ba, ca + cb, la], data };
        Ok(self.push(Cow::Owned(value), Op::Concat { a, b }, ng))
    }

    /// `s ⊙ alpha` with `alpha` (`[batch, 1, length]`) broadcast over channels.
    pub fn gate(&mut self, s: Var, alpha: Var) -> Result<Var> {
        let (bs, cs, ls) = self.value(s).dims3();
        if self.value(alpha).shape != [bs, 1, ls] {
            return Err(Error::Shape(format!(
                "gate coefficients {:?} do not match features [{bs}, {cs}, {ls}]",
                self.value(alpha).shape
            )));
        }
        let sv = &self.value(s).data;
        let av = &self.value(alpha).data;
        let data = sv
            .chunks_exact(ls)
            .enumerate()
            .flat_map(|(row, src)| {
                let a = &av[(row / cs) * ls..(row / cs + 1) * ls];
                src.iter().zip(a).map(|(x, y)| x * y)
            })
            .collect();
        let ng = self.ng(&[s, alpha]);
        let value = Tensor { shape: vec![bs, cs, ls], data };
        Ok(self.push(Cow::Owned(value), Op::Gate { s, alpha }, ng))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        if self.value(a).shape != self.value(b).shape {
            return Err(Error::Shape("add operands differ in shape".into()));
        }
        let data = self.value(a).data.iter().zip(&self.value(b).data).map(|(x, y)| x + y).collect();
        let ng = self.ng(&[a, b]);
        let value = Tensor { shape: self.value(a).shape.clone(), data };
        Ok(self.push(Cow::Owned(value), Op::Add { a, b }, ng))
    }

    /// Average over length: `[batch, ch, len] -> [batch, ch, 1]`.
    pub fn mean_length(&mut self, x: Var) -> Var {
        let (batch, ch, len) = self.value(x).dims3();
        let data = self.value(x).data.chunks_exact(len).map(|r| r.iter().sum::<f64>() / len as f64).collect();
        let ng = self.ng(&[x]);
        let value = Tensor { shape: vec![batch, ch, 1], data };
        self.push(Cow::Owned(value), Op::MeanLength { x }, ng)
    }

    /// Back-propagates `seed` (the gradient of a scalar objective w.r.t.
    /// `root`) to every node that needs a gradient.
    pub fn backward(&self, root: Var, seed: Tensor) -> Result<Grads> {
        if seed.shape != self.value(root).shape {
            return Err(Error::Shape(format!(
                "seed gradient {:?} does not match root {:?}",
                seed.shape,
                self.value(root).shape
            )));
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[root.0] = Some(seed);

        for id in (0..=root.0).rev() {
            let node = &self.nodes[id];
            if !node.needs_grad || matches!(node.op, Op::Leaf) {
                continue;
            }
            let Some(gy) = grads[id].take() else { continue };
            self.backward_node(node, &gy, &mut grads);
        }
        Ok(Grads { grads })
    }

    fn wants(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    fn backward_node(&self, node: &Node<'p>, gy: &Tensor, grads: &mut [Option<Tensor>]) {
        let y = &node.value;
        match &node.op {
            Op::Leaf => {}
            Op::Conv1d { x, w, b, stride, pad_left } => {
                let xv = self.value(*x);
                let wv = self.value(*w);
                let (batch, cin, len) = xv.dims3();
                let (cout, kernel) = (wv.shape[0], wv.shape[2]);
                let lout = y.shape[2];
                let rows = cin * kernel;
                let (want_x, want_w, want_b) = (self.wants(*x), self.wants(*w), self.wants(*b));
                let mut gw = want_w.then(|| vec![0.0; wv.numel()]);
                let mut gb = want_b.then(|| vec![0.0; cout]);
                let mut gx = want_x.then(|| vec![0.0; xv.numel()]);
                let mut cols = vec![0.0; rows * lout];
                let mut dcols = vec![0.0; rows * lout];
                for bi in 0..batch {
                    let go = &gy.data[bi * cout * lout..(bi + 1) * cout * lout];
                    if let Some(gb) = gb.as_mut() {
                        for (co, row) in go.chunks_exact(lout).enumerate() {
                            gb[co] += row.iter().sum::<f64>();
                        }
                    }
                    if let Some(gw) = gw.as_mut() {
                        im2col(xv.item(bi), cin, len, kernel, *stride, *pad_left, lout, &mut cols);
                        // gw += go · colsᵀ
                        gemm(cout, lout, rows, go, (lout, 1), &cols, (1, lout), gw, 1.0);
                    }
                    if let Some(gx) = gx.as_mut() {
                        // dcols = wᵀ · go
                        gemm(rows, cout, lout, &wv.data, (1, rows), go, (lout, 1), &mut dcols, 0.0);
                        col2im(
                            &dcols,
                            cin,
                            len,
                            kernel,
                            *stride,
                            *pad_left,
                            lout,
                            &mut gx[bi * cin * len..(bi + 1) * cin * len],
                        );
                    }
                }
                if let Some(g) = gx {
                    accumulate(grads, *x, &xv.shape, g);
                }
                if let Some(g) = gw {
                    accumulate(grads, *w, &wv.shape, g);
                }
                if let Some(g) = gb {
                    accumulate(grads, *b, &[cout], g);
                }
            }
            Op::LeakyRelu { x, slope } => {
                let xv = self.value(*x);
                let g = gy
                    .data
                    .iter()
                    .zip(&xv.data)
                    .map(|(g, v)| if *v > 0.0 { *g } else { slope * g })
                    .collect();
                accumulate(grads, *x, &xv.shape, g);
            }
            Op::Tanh { x } => {
                let g = gy.data.iter().zip(&y.data).map(|(g, t)| g * (1.0 - t * t)).collect();
                accumulate(grads, *x, &y.shape, g);
            }
            Op::Sigmoid { x } => {
                let g = gy.data.iter().zip(&y.data).map(|(g, s)| g * s * (1.0 - s)).collect();
                accumulate(grads, *x, &y.shape, g);
            }
            Op::InstanceNorm { x, gamma, beta, xhat, inv_std } => {
                let (_, ch, len) = y.dims3();
                let gv = &self.value(*gamma).data;
                let mut ggamma = vec![0.0; ch];
                let mut gbeta = vec![0.0; ch];
                let mut gx = self.wants(*x).then(|| vec![0.0; y.numel()]);
                for (row, (gr, xh)) in gy.data.chunks_exact(len).zip(xhat.chunks_exact(len)).enumerate() {
                    let c = row % ch;
                    let sum_g: f64 = gr.iter().sum();
                    let sum_gx: f64 = gr.iter().zip(xh).map(|(a, b)| a * b).sum();
                    ggamma[c] += sum_gx;
                    gbeta[c] += sum_g;
                    if let Some(gx) = gx.as_mut() {
                        let k = gv[c] * inv_std[row] / len as f64;
                        let dst = &mut gx[row * len..(row + 1) * len];
                        for ((d, g), h) in dst.iter_mut().zip(gr).zip(xh) {
                            *d = k * (len as f64 * g - sum_g - h * sum_gx);
                        }
                    }
                }
                if let Some(g) = gx {
                    accumulate(grads, *x, &y.shape, g);
                }
                if self.wants(*gamma) {
                    accumulate(grads, *gamma, &[ch], ggamma);
                }
                if self.wants(*beta) {
                    accumulate(grads, *beta, &[ch], gbeta);
                }
            }
            Op::Upsample2 { x } => {
                let g = gy.data.chunks_exact(2).map(|p| p[0] + p[1]).collect();
                accumulate(grads, *x, &self.value(*x).shape, g);
            }
            Op::Concat { a, b } => {
                let (batch, ca, len) = self.value(*a).dims3();
                let cb = self.value(*b).dims3().1;
                let (mut ga, mut gb) = (Vec::with_capacity(batch * ca * len), Vec::with_capacity(batch * cb * len));
                for item in gy.data.chunks_exact((ca + cb) * len) {
                    ga.extend_from_slice(&item[..ca * len]);
                    gb.extend_from_slice(&item[ca * len..]);
                }
                if self.wants(*a) {
                    accumulate(grads, *a, &[batch, ca, len], ga);
                }
                if self.wants(*b) {
                    accumulate(grads, *b, &[batch, cb, len], gb);
                }
            }
            Op::Gate { s, alpha } => {
                let sv = self.value(*s);
                let av = self.value(*alpha);
                let (batch, cs, ls) = sv.dims3();
                if self.wants(*s) {
                    let g = gy
                        .data
                        .chunks_exact(ls)
                        .enumerate()
                        .flat_map(|(row, gr)| {
                            let a = &av.data[(row / cs) * ls..(row / cs + 1) * ls];
                            gr.iter().zip(a).map(|(g, a)| g * a)
                        })
                        .collect();
                    accumulate(grads, *s, &sv.shape, g);
                }
                if self.wants(*alpha) {
                    let mut ga = vec![0.0; batch * ls];
                    for (row, (gr, sr)) in gy.data.chunks_exact(ls).zip(sv.data.chunks_exact(ls)).enumerate() {
                        let dst = &mut ga[(row / cs) * ls..(row / cs + 1) * ls];
                        for ((d, g), s) in dst.iter_mut().zip(gr).zip(sr) {
                            *d += g * s;
                        }
                    }
                    accumulate(grads, *alpha, &av.shape, ga);
                }
            }
            Op::Add { a, b } => {
                if self.wants(*a) {
                    accumulate(grads, *a, &y.shape, gy.data.clone());
                }
                if self.wants(*b) {
                    accumulate(grads, *b, &y.shape, gy.data.clone());
                }
            }
            Op::MeanLength { x } => {
                let xv = self.value(*x);
                let len = xv.shape[2];
                let g = gy.data.iter().flat_map(|g| std::iter::repeat_n(g / len as f64, len)).collect();
                accumulate(grads, *x, &xv.shape, g);
            }
        }
    }
}

fn accumulate(grads: &mut [Option<Tensor>], v: Var, shape: &[usize], g: Vec<f64>) {
    match grads[v.0].as_mut() {
        Some(t) => t.data.iter_mut().zip(&g).for_each(|(a, b)| *a += b),
        None => grads[v.0] = Some(Tensor { shape: shape.to_vec(), data: g }),
    }
}

pub fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

#[allow(clippy::too_many_arguments)]
fn im2col(
    x: &[f64],
    cin: usize,
    len: usize,
    kernel: usize,
    stride: usize,
    pad_left: usize,
    lout: usize,
    cols: &mut [f64],
) {
    for ci in 0..cin {
        let src = &x[ci * len..(ci + 1) * len];
        for k in 0..kernel {
            let dst = &mut cols[(ci * kernel + k) * lout..(ci * kernel + k + 1) * lout];
            for (t, d) in dst.iter_mut().enumerate() {
                let pos = (t * stride + k) as isize - pad_left as isize;
                *d = if pos >= 0 && (pos as usize) < len { src[pos as usize] } else { 0.0 };
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn col2im(
    cols: &[f64],
    cin: usize,
    len: usize,
    kernel: usize,
    stride: usize,
    pad_left: usize,
    lout: usize,
    dx: &mut [f64],
) {
    for ci in 0..cin {
        let dst = &mut dx[ci * len..(ci + 1) * len];
        for k in 0..kernel {
            let src = &cols[(ci * kernel + k) * lout..(ci * kernel + k + 1) * lout];
            for (t, v) in src.iter().enumerate() {
                let pos = (t * stride + k) as isize - pad_left as isize;
                if pos >= 0 && (pos as usize) < len {
                    dst[pos as usize] += v;
                }
            }
        }
    }
}

/// `c = a·b + beta·c` for an `m×k` by `k×n` product with explicit
/// `(row, column)` strides on `a` and `b`; `c` is dense row-major.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
    beta: f64,
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(c.len() >= m * n);
    if k > 0 {
        assert!(a.len() > (m - 1) * rsa + (k - 1) * csa);
        assert!(b.len() > (k - 1) * rsb + (n - 1) * csb);
    }
    // SAFETY: the asserts above bound every index the kernel touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_arithmetic() {
        assert_eq!(same_padding(512, 16, 1), (512, 7));
        assert_eq!(same_padding(512, 16, 2), (256, 7));
        assert_eq!(same_padding(64, 16, 1), (64, 7));
        assert_eq!(same_padding(16, 3, 2), (8, 0));
    }

    /// Direct scalar-loop convolution used as an oracle.
    fn conv_ref(x: &Tensor, w: &Tensor, b: &[f64], stride: usize) -> Tensor {
        let (batch, cin, len) = x.dims3();
        let (cout, kernel) = (w.shape[0], w.shape[2]);
        let (lout, pl) = same_padding(len, kernel, stride);
        let mut out = Tensor::zeros(&[batch, cout, lout]);
        for bi in 0..batch {
            for co in 0..cout {
                for t in 0..lout {
                    let mut acc = b[co];
                    for ci in 0..cin {
                        for k in 0..kernel {
                            let pos = (t * stride + k) as isize - pl as isize;
                            if pos >= 0 && (pos as usize) < len {
                                acc += w.data[(co * cin + ci) * kernel + k]
                                    * x.data[(bi * cin + ci) * len + pos as usize];
                            }
                        }
                    }
                    out.data[(bi * cout + co) * lout + t] = acc;
                }
            }
        }
        out
    }

    fn pseudo(n: usize, seed: u64) -> Vec<f64> {
        (0..n).map(|i| (((i as u64 + 1) * 2654435761 + seed * 97) % 1000) as f64 / 500.0 - 1.0).collect()
    }

    #[test]
    fn conv_matches_scalar_loop() {
        for (stride, kernel) in [(1, 16), (2, 16), (1, 1), (2, 3)] {
            let x = Tensor::new(vec![2, 3, 20], pseudo(120, 1)).unwrap();
            let w = Tensor::new(vec![4, 3, kernel], pseudo(12 * kernel, 2)).unwrap();
            let b = Tensor::new(vec![4], pseudo(4, 3)).unwrap();
            let mut g = Graph::new();
            let (xv, wv, bv) = (g.input(x.clone(), false), g.param(&w, false), g.param(&b, false));
            let y = g.conv1d(xv, wv, bv, stride).unwrap();
            let r = conv_ref(&x, &w, &b.data, stride);
            assert_eq!(g.value(y).shape, r.shape);
            for (a, e) in g.value(y).data.iter().zip(&r.data) {
                assert!((a - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let x = Tensor::zeros(&[1, 2, 8]);
        let w = Tensor::zeros(&[3, 5, 3]);
        let b = Tensor::zeros(&[3]);
        let mut g = Graph::new();
        let (xv, wv, bv) = (g.input(x, false), g.param(&w, false), g.param(&b, false));
        assert!(g.conv1d(xv, wv, bv, 1).is_err());
    }
}
