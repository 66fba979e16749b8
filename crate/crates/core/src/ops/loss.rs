use crate::error::{Result, TensorError};
use crate::graph::{Graph, Op, Var};
use crate::scalar::Real;
use crate::tensor::Tensor;

impl<T: Real> Graph<T> {
    /// Mean absolute error over all elements.
    pub fn l1_loss(&mut self, pred: Var, target: Var) -> Result<Var> {
        if self.shape(pred) != self.shape(target) {
            return Err(TensorError::dim(
                "l1_loss",
                format!("{:?} vs {:?}", self.shape(pred), self.shape(target)),
            ));
        }
        let p = self.value(pred).data();
        let t = self.value(target).data();
        let total: T = p.iter().zip(t).map(|(&a, &b)| (a - b).abs()).sum();
        let mean = total / T::of(p.len() as f64);
        self.push("l1_loss", Op::L1Loss { pred, target }, Tensor::scalar(mean))
    }
}

pub(crate) fn l1_backward<T: Real>(g: &Graph<T>, pred: Var, target: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let p = g.value(pred);
    let t = g.value(target);
    let scale = grad.data()[0] / T::of(p.len() as f64);
    let sign: Vec<T> = p
        .data()
        .iter()
        .zip(t.data())
        .map(|(&a, &b)| {
            if a > b {
                scale
            } else if a < b {
                -scale
            } else {
                T::zero()
            }
        })
        .collect();
    if g.needs_grad(target) {
        out.push((target, Tensor::from_vec(p.shape(), sign.iter().map(|&v| -v).collect()).expect("shape")));
    }
    if g.needs_grad(pred) {
        out.push((pred, Tensor::from_vec(p.shape(), sign).expect("shape")));
    }
}
