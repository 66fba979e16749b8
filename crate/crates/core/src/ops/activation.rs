use crate::error::Result;
use crate::graph::{Graph, Op, Var};
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Overflow-free logistic function.
#[inline]
pub(crate) fn logistic<T: Real>(v: T) -> T {
    if v >= T::zero() {
        T::one() / (T::one() + (-v).exp())
    } else {
        let e = v.exp();
        e / (T::one() + e)
    }
}

impl<T: Real> Graph<T> {
    pub fn relu(&mut self, x: Var) -> Result<Var> {
        let out = self.value(x).map(|v| if v > T::zero() { v } else { T::zero() });
        self.push("relu", Op::Relu(x), out)
    }

    pub fn sigmoid(&mut self, x: Var) -> Result<Var> {
        let out = self.value(x).map(logistic);
        self.push("sigmoid", Op::Sigmoid(x), out)
    }
}

pub(crate) fn relu_backward<T: Real>(g: &Graph<T>, x: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let data = grad
        .data()
        .iter()
        .zip(g.value(x).data())
        .map(|(&d, &v)| if v > T::zero() { d } else { T::zero() })
        .collect();
    out.push((x, Tensor::from_vec(grad.shape(), data).expect("shape preserved")));
}

pub(crate) fn sigmoid_backward<T: Real>(
    _g: &Graph<T>,
    x: Var,
    y: &Tensor<T>,
    grad: &Tensor<T>,
    out: &mut Vec<(Var, Tensor<T>)>,
) {
    let data = grad.data().iter().zip(y.data()).map(|(&d, &s)| d * s * (T::one() - s)).collect();
    out.push((x, Tensor::from_vec(grad.shape(), data).expect("shape preserved")));
}
