//! Define-by-run reverse-mode autodiff tape.
//!
//! Every operation appends a node holding its forward value and the ids of
//! its inputs, so node ids are a topological order by construction. Backward
//! walks the ids in reverse and sums the gradient contributions of all
//! consumers into each input.

use crate::error::{Result, TensorError};
use crate::kernels::ConvGeom;
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub(crate) usize);

impl Var {
    pub fn id(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Leaf,
    Add(Var, Var),
    Mul(Var, Var),
    Scale { x: Var, s: Var },
    MulChannel { x: Var, gate: Var },
    Relu(Var),
    Sigmoid(Var),
    Conv { x: Var, w: Var, b: Var, geom: ConvGeom, batch: usize, cout: usize },
    Matmul(Var, Var),
    SoftmaxRows(Var),
    GlobalAvgPool(Var),
    SumAll(Var),
    SumAxis0(Var),
    Reshape(Var),
    Permute { x: Var, axes: Vec<usize> },
    PixelShuffle { x: Var, s: usize },
    PixelUnshuffle { x: Var, s: usize },
    Stack(Vec<Var>),
    Select { x: Var, index: usize },
    L1Loss { pred: Var, target: Var },
}

impl Op {
    fn inputs(&self) -> Vec<Var> {
        match self {
            Op::Leaf => vec![],
            Op::Add(a, b) | Op::Mul(a, b) | Op::Matmul(a, b) => vec![*a, *b],
            Op::Scale { x, s } => vec![*x, *s],
            Op::MulChannel { x, gate } => vec![*x, *gate],
            Op::Conv { x, w, b, .. } => vec![*x, *w, *b],
            Op::L1Loss { pred, target } => vec![*pred, *target],
            Op::Relu(x)
            | Op::Sigmoid(x)
            | Op::SoftmaxRows(x)
            | Op::GlobalAvgPool(x)
            | Op::SumAll(x)
            | Op::SumAxis0(x)
            | Op::Reshape(x)
            | Op::Permute { x, .. }
            | Op::PixelShuffle { x, .. }
            | Op::PixelUnshuffle { x, .. }
            | Op::Select { x, .. } => vec![*x],
            Op::Stack(xs) => xs.clone(),
        }
    }
}

pub(crate) struct Node<T> {
    pub(crate) value: Tensor<T>,
    pub(crate) grad: Option<Tensor<T>>,
    pub(crate) requires_grad: bool,
    pub(crate) op: Op,
}

/// Single-owner tape. Values are immutable once recorded.
pub struct Graph<T> {
    pub(crate) nodes: Vec<Node<T>>,
}

impl<T: Real> Default for Graph<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Graph<T> {
    pub fn new() -> Self {
        Graph { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaf(&mut self, value: Tensor<T>, requires_grad: bool) -> Var {
        self.nodes.push(Node { value, grad: None, requires_grad, op: Op::Leaf });
        Var(self.nodes.len() - 1)
    }

    /// Trainable leaf.
    pub fn param(&mut self, value: Tensor<T>) -> Var {
        self.leaf(value, true)
    }

    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.leaf(value, false)
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> &[usize] {
        self.nodes[v.0].value.shape()
    }

    pub fn grad(&self, v: Var) -> Option<&Tensor<T>> {
        self.nodes[v.0].grad.as_ref()
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    pub fn zero_grad(&mut self) {
        for node in &mut self.nodes {
            node.grad = None;
        }
    }

    pub(crate) fn push(&mut self, op_name: &'static str, op: Op, value: Tensor<T>) -> Result<Var> {
        if !value.is_finite() {
            return Err(TensorError::NonFinite { op: op_name });
        }
        let requires_grad = op.inputs().iter().any(|v| self.nodes[v.0].requires_grad);
        self.nodes.push(Node { value, grad: None, requires_grad, op });
        Ok(Var(self.nodes.len() - 1))
    }

    /// Populate `grad` on every `requires_grad` node reachable from `loss`.
    ///
    /// Gradients accumulate across calls until [`Graph::zero_grad`].
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let value = &self.nodes[loss.0].value;
        if value.len() != 1 {
            return Err(TensorError::contract(
                "backward",
                format!("loss must be a scalar, got shape {:?}", value.shape()),
            ));
        }
        if !self.nodes[loss.0].requires_grad {
            return Ok(());
        }
        let seed = Tensor::ones(value.shape());
        accumulate(&mut self.nodes[loss.0].grad, seed);

        let mut contributions = Vec::new();
        for id in (0..=loss.0).rev() {
            let node = &self.nodes[id];
            if !node.requires_grad || matches!(node.op, Op::Leaf) {
                continue;
            }
            let Some(grad) = node.grad.as_ref() else { continue };
            self.node_backward(id, grad, &mut contributions);
            for (input, g) in contributions.drain(..) {
                let target = &mut self.nodes[input.0];
                if target.requires_grad {
                    accumulate(&mut target.grad, g);
                }
            }
        }
        Ok(())
    }

    pub(crate) fn needs_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    fn node_backward(&self, id: usize, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
        use crate::ops;
        let node = &self.nodes[id];
        match &node.op {
            Op::Leaf => {}
            Op::Add(a, b) => {
                out.push((*a, grad.clone()));
                out.push((*b, grad.clone()));
            }
            Op::Mul(a, b) => ops::elementwise::mul_backward(self, *a, *b, grad, out),
            Op::Scale { x, s } => ops::elementwise::scale_backward(self, *x, *s, grad, out),
            Op::MulChannel { x, gate } => ops::elementwise::mul_channel_backward(self, *x, *gate, grad, out),
            Op::Relu(x) => ops::activation::relu_backward(self, *x, grad, out),
            Op::Sigmoid(x) => ops::activation::sigmoid_backward(self, *x, &node.value, grad, out),
            Op::Conv { x, w, b, geom, batch, cout } => {
                ops::conv::conv_backward(self, [*x, *w, *b], geom, *batch, *cout, grad, out)
            }
            Op::Matmul(a, b) => ops::linalg::matmul_backward(self, *a, *b, grad, out),
            Op::SoftmaxRows(x) => ops::linalg::softmax_rows_backward(*x, &node.value, grad, out),
            Op::GlobalAvgPool(x) => ops::reduce::global_avg_pool_backward(self, *x, grad, out),
            Op::SumAll(x) => ops::reduce::sum_all_backward(self, *x, grad, out),
            Op::SumAxis0(x) => ops::reduce::sum_axis0_backward(self, *x, grad, out),
            Op::Reshape(x) => ops::shape::reshape_backward(self, *x, grad, out),
            Op::Permute { x, axes } => ops::shape::permute_backward(*x, axes, grad, out),
            Op::PixelShuffle { x, s } => ops::shape::pixel_shuffle_backward(*x, *s, grad, out),
            Op::PixelUnshuffle { x, s } => ops::shape::pixel_unshuffle_backward(*x, *s, grad, out),
            Op::Stack(xs) => ops::shape::stack_backward(xs, grad, out),
            Op::Select { x, index } => ops::shape::select_backward(self, *x, *index, grad, out),
            Op::L1Loss { pred, target } => ops::loss::l1_backward(self, *pred, *target, grad, out),
        }
    }
}

fn accumulate<T: Real>(slot: &mut Option<Tensor<T>>, g: Tensor<T>) {
    match slot {
        Some(existing) => existing.add_assign(&g),
        None => *slot = Some(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_gives_unit_gradient() {
        let mut g = Graph::<f64>::new();
        let x = g.param(Tensor::from_fn(&[2, 3], |i| i as f64 - 2.5));
        let s = g.sum_all(x).unwrap();
        g.backward(s).unwrap();
        assert_eq!(g.grad(x).unwrap().data(), &[1.0; 6]);
    }

    #[test]
    fn diamond_accumulates_both_paths() {
        let mut g = Graph::<f64>::new();
        let x = g.param(Tensor::from_vec(&[3], vec![1.0, -2.0, 0.5]).unwrap());
        let y = g.add(x, x).unwrap();
        let w = g.constant(Tensor::from_vec(&[3], vec![3.0, 4.0, 5.0]).unwrap());
        let z = g.mul(y, w).unwrap();
        let s = g.sum_all(z).unwrap();
        g.backward(s).unwrap();
        assert_eq!(g.grad(x).unwrap().data(), &[6.0, 8.0, 10.0]);
    }

    #[test]
    fn backward_rejects_non_scalar() {
        let mut g = Graph::<f32>::new();
        let x = g.param(Tensor::zeros(&[2]));
        let err = g.backward(x).unwrap_err();
        assert!(matches!(err, TensorError::Contract { .. }));
    }

    #[test]
    fn constants_receive_no_gradient() {
        let mut g = Graph::<f64>::new();
        let x = g.param(Tensor::ones(&[2]));
        let c = g.constant(Tensor::ones(&[2]));
        let y = g.mul(x, c).unwrap();
        let s = g.sum_all(y).unwrap();
        g.backward(s).unwrap();
        assert!(g.grad(x).is_some());
        assert!(g.grad(c).is_none());
    }

    #[test]
    fn non_finite_output_is_an_error() {
        let mut g = Graph::<f32>::new();
        let x = g.constant(Tensor::full(&[2], f32::MAX));
        let err = g.add(x, x).unwrap_err();
        assert_eq!(err, TensorError::NonFinite { op: "add" });
    }
}
