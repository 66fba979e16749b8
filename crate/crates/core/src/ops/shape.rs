use crate::error::{Result, TensorError};
use crate::graph::{Graph, Op, Var};
use crate::scalar::Real;
use crate::tensor::{validate_shape, Tensor, MAX_RANK};

fn check_axes(op: &'static str, rank: usize, axes: &[usize]) -> Result<()> {
    let mut seen = [false; MAX_RANK];
    if axes.len() != rank || axes.iter().any(|&a| a >= rank || std::mem::replace(&mut seen[a], true)) {
        return Err(TensorError::contract(op, format!("{axes:?} is not a permutation of 0..{rank}")));
    }
    Ok(())
}

/// Physically reorder `x` so that output axis `i` is input axis `axes[i]`.
pub fn permute_tensor<T: Real>(x: &Tensor<T>, axes: &[usize]) -> Result<Tensor<T>> {
    check_axes("permute", x.rank(), axes)?;
    let in_strides = x.strides();
    let shape: Vec<usize> = axes.iter().map(|&a| x.shape()[a]).collect();
    let strides: Vec<usize> = axes.iter().map(|&a| in_strides[a]).collect();
    let rank = shape.len();
    let src = x.data();
    let mut out = Vec::with_capacity(src.len());
    let mut index = vec![0usize; rank];
    let mut offset = 0usize;
    for _ in 0..src.len() {
        out.push(src[offset]);
        for ax in (0..rank).rev() {
            index[ax] += 1;
            offset += strides[ax];
            if index[ax] < shape[ax] {
                break;
            }
            offset -= strides[ax] * shape[ax];
            index[ax] = 0;
        }
    }
    Tensor::from_vec(&shape, out)
}

fn inverse_axes(axes: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; axes.len()];
    for (i, &a) in axes.iter().enumerate() {
        inv[a] = i;
    }
    inv
}

/// `[N, C·s², H, W] → [N, C, s·H, s·W]` with
/// `out[n, c, s·h+a, s·w+b] = x[n, c·s² + a·s + b, h, w]`.
pub fn pixel_shuffle_tensor<T: Real>(x: &Tensor<T>, s: usize) -> Result<Tensor<T>> {
    let sh = x.shape();
    if sh.len() != 4 || s == 0 || sh[1] % (s * s) != 0 {
        return Err(TensorError::dim("pixel_shuffle", format!("{sh:?} not divisible into scale {s}")));
    }
    let (n, cin, h, w) = (sh[0], sh[1], sh[2], sh[3]);
    let c = cin / (s * s);
    let (oh, ow) = (h * s, w * s);
    let src = x.data();
    let mut out = vec![T::zero(); src.len()];
    for b in 0..n {
        for ch in 0..c {
            for a in 0..s {
                for bb in 0..s {
                    let ic = ch * s * s + a * s + bb;
                    let src_plane = &src[((b * cin + ic) * h) * w..((b * cin + ic) * h + h) * w];
                    for y in 0..h {
                        let dst_row = ((b * c + ch) * oh + s * y + a) * ow;
                        for xx in 0..w {
                            out[dst_row + s * xx + bb] = src_plane[y * w + xx];
                        }
                    }
                }
            }
        }
    }
    Tensor::from_vec(&[n, c, oh, ow], out)
}

/// Exact inverse of [`pixel_shuffle_tensor`].
pub fn pixel_unshuffle_tensor<T: Real>(x: &Tensor<T>, s: usize) -> Result<Tensor<T>> {
    let sh = x.shape();
    if sh.len() != 4 || s == 0 || sh[2] % s != 0 || sh[3] % s != 0 {
        return Err(TensorError::dim("pixel_unshuffle", format!("{sh:?} not divisible by scale {s}")));
    }
    let (n, c, oh, ow) = (sh[0], sh[1], sh[2], sh[3]);
    let (h, w) = (oh / s, ow / s);
    let cout = c * s * s;
    let src = x.data();
    let mut out = vec![T::zero(); src.len()];
    for b in 0..n {
        for ch in 0..c {
            for a in 0..s {
                for bb in 0..s {
                    let oc = ch * s * s + a * s + bb;
                    let base = ((b * cout + oc) * h) * w;
                    for y in 0..h {
                        let src_row = ((b * c + ch) * oh + s * y + a) * ow;
                        for xx in 0..w {
                            out[base + y * w + xx] = src[src_row + s * xx + bb];
                        }
                    }
                }
            }
        }
    }
    Tensor::from_vec(&[n, cout, h, w], out)
}

impl<T: Real> Graph<T> {
    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var> {
        let out = self.value(x).clone().reshaped(shape)?;
        self.push("reshape", Op::Reshape(x), out)
    }

    pub fn permute(&mut self, x: Var, axes: &[usize]) -> Result<Var> {
        let out = permute_tensor(self.value(x), axes)?;
        self.push("permute", Op::Permute { x, axes: axes.to_vec() }, out)
    }

    /// Matrix transpose, a 2D permute.
    pub fn transpose(&mut self, x: Var) -> Result<Var> {
        self.permute(x, &[1, 0])
    }

    pub fn pixel_shuffle(&mut self, x: Var, s: usize) -> Result<Var> {
        let out = pixel_shuffle_tensor(self.value(x), s)?;
        self.push("pixel_shuffle", Op::PixelShuffle { x, s }, out)
    }

    pub fn pixel_unshuffle(&mut self, x: Var, s: usize) -> Result<Var> {
        let out = pixel_unshuffle_tensor(self.value(x), s)?;
        self.push("pixel_unshuffle", Op::PixelUnshuffle { x, s }, out)
    }

    /// Stack equal-shape tensors along a new leading axis.
    pub fn stack(&mut self, xs: &[Var]) -> Result<Var> {
        let Some(&first) = xs.first() else {
            return Err(TensorError::contract("stack", "no inputs"));
        };
        let inner = self.shape(first).to_vec();
        if let Some(bad) = xs.iter().find(|&&v| self.shape(v) != inner.as_slice()) {
            return Err(TensorError::dim("stack", format!("{:?} vs {inner:?}", self.shape(*bad))));
        }
        let mut shape = vec![xs.len()];
        shape.extend_from_slice(&inner);
        validate_shape("stack", &shape)?;
        let data: Vec<T> = xs.iter().flat_map(|&v| self.value(v).data().iter().copied()).collect();
        let out = Tensor::from_vec(&shape, data)?;
        self.push("stack", Op::Stack(xs.to_vec()), out)
    }

    /// Slice `index` of the leading axis: `[G, ...] → [...]`.
    pub fn select(&mut self, x: Var, index: usize) -> Result<Var> {
        let s = self.shape(x).to_vec();
        if s.len() < 2 || index >= s[0] {
            return Err(TensorError::dim("select", format!("index {index} into {s:?}")));
        }
        let inner: usize = s[1..].iter().product();
        let data = self.value(x).data()[index * inner..(index + 1) * inner].to_vec();
        let out = Tensor::from_vec(&s[1..], data)?;
        self.push("select", Op::Select { x, index }, out)
    }
}

pub(crate) fn reshape_backward<T: Real>(g: &Graph<T>, x: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    out.push((x, grad.clone().reshaped(g.shape(x)).expect("same element count")));
}

pub(crate) fn permute_backward<T: Real>(x: Var, axes: &[usize], grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    out.push((x, permute_tensor(grad, &inverse_axes(axes)).expect("valid permutation")));
}

pub(crate) fn pixel_shuffle_backward<T: Real>(x: Var, s: usize, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    out.push((x, pixel_unshuffle_tensor(grad, s).expect("shuffled shape")));
}

pub(crate) fn pixel_unshuffle_backward<T: Real>(x: Var, s: usize, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    out.push((x, pixel_shuffle_tensor(grad, s).expect("unshuffled shape")));
}

pub(crate) fn stack_backward<T: Real>(xs: &[Var], grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let inner_shape = &grad.shape()[1..];
    let inner: usize = inner_shape.iter().product();
    for (&x, chunk) in xs.iter().zip(grad.data().chunks(inner)) {
        out.push((x, Tensor::from_vec(inner_shape, chunk.to_vec()).expect("slice shape")));
    }
}

pub(crate) fn select_backward<T: Real>(g: &Graph<T>, x: Var, index: usize, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let mut dx = Tensor::zeros(g.shape(x));
    let inner = grad.len();
    dx.data_mut()[index * inner..(index + 1) * inner].copy_from_slice(grad.data());
    out.push((x, dx));
}
