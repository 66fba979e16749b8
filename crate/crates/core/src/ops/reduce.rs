use crate::error::{Result, TensorError};
use crate::graph::{Graph, Op, Var};
use crate::scalar::Real;
use crate::tensor::Tensor;

impl<T: Real> Graph<T> {
    /// `[N,C,H,W] → [N,C,1,1]` channel means.
    pub fn global_avg_pool(&mut self, x: Var) -> Result<Var> {
        let s = self.shape(x).to_vec();
        if s.len() != 4 {
            return Err(TensorError::dim("global_avg_pool", format!("rank-4 input expected, got {s:?}")));
        }
        let plane = s[2] * s[3];
        let inv = T::of(plane as f64);
        let means = self.value(x).data().chunks(plane).map(|c| c.iter().copied().sum::<T>() / inv).collect();
        let out = Tensor::from_vec(&[s[0], s[1], 1, 1], means)?;
        self.push("global_avg_pool", Op::GlobalAvgPool(x), out)
    }

    pub fn sum_all(&mut self, x: Var) -> Result<Var> {
        let total: T = self.value(x).data().iter().copied().sum();
        self.push("sum_all", Op::SumAll(x), Tensor::scalar(total))
    }

    /// Sum over the leading axis: `[G, ...] → [...]`, accumulated in index order.
    pub fn sum_axis0(&mut self, x: Var) -> Result<Var> {
        let s = self.shape(x).to_vec();
        if s.len() < 2 {
            return Err(TensorError::dim("sum_axis0", format!("rank >= 2 expected, got {s:?}")));
        }
        let inner: usize = s[1..].iter().product();
        let data = self.value(x).data();
        let mut acc = data[..inner].to_vec();
        for chunk in data[inner..].chunks(inner) {
            for (a, &v) in acc.iter_mut().zip(chunk) {
                *a += v;
            }
        }
        let out = Tensor::from_vec(&s[1..], acc)?;
        self.push("sum_axis0", Op::SumAxis0(x), out)
    }
}

pub(crate) fn global_avg_pool_backward<T: Real>(g: &Graph<T>, x: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let s = g.shape(x);
    let plane = s[2] * s[3];
    let inv = T::of(plane as f64);
    let data = grad.data().iter().flat_map(|&d| std::iter::repeat_n(d / inv, plane)).collect();
    out.push((x, Tensor::from_vec(s, data).expect("shape")));
}

pub(crate) fn sum_all_backward<T: Real>(g: &Graph<T>, x: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    out.push((x, Tensor::full(g.shape(x), grad.data()[0])));
}

pub(crate) fn sum_axis0_backward<T: Real>(g: &Graph<T>, x: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let s = g.shape(x);
    let data = std::iter::repeat_n(grad.data(), s[0]).flatten().copied().collect();
    out.push((x, Tensor::from_vec(s, data).expect("shape")));
}
