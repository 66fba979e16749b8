use crate::error::{Result, TensorError};
use crate::graph::{Graph, Op, Var};
use crate::kernels::{gemm_nn, gemm_nt, gemm_tn};
use crate::scalar::Real;
use crate::tensor::Tensor;

impl<T: Real> Graph<T> {
    /// `[M,K] · [K,P] → [M,P]`
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa.len() != 2 || sb.len() != 2 || sa[1] != sb[0] {
            return Err(TensorError::dim("matmul", format!("{sa:?} · {sb:?}")));
        }
        let (m, k, p) = (sa[0], sa[1], sb[1]);
        let mut c = vec![T::zero(); m * p];
        gemm_nn(m, k, p, self.value(a).data(), self.value(b).data(), &mut c);
        self.push("matmul", Op::Matmul(a, b), Tensor::from_vec(&[m, p], c)?)
    }

    /// Row-wise softmax of a matrix, stabilised by subtracting each row's maximum.
    pub fn softmax_rows(&mut self, x: Var) -> Result<Var> {
        let s = self.shape(x);
        if s.len() != 2 {
            return Err(TensorError::dim("softmax_rows", format!("matrix expected, got {s:?}")));
        }
        if !self.value(x).is_finite() {
            return Err(TensorError::NonFinite { op: "softmax_rows" });
        }
        let cols = s[1];
        let mut out = self.value(x).clone();
        for row in out.data_mut().chunks_mut(cols) {
            let max = row.iter().copied().fold(T::neg_infinity(), T::max);
            let mut total = T::zero();
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                total += *v;
            }
            for v in row.iter_mut() {
                *v /= total;
            }
        }
        self.push("softmax_rows", Op::SoftmaxRows(x), out)
    }
}

pub(crate) fn matmul_backward<T: Real>(g: &Graph<T>, a: Var, b: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let (m, k) = (g.shape(a)[0], g.shape(a)[1]);
    let p = g.shape(b)[1];
    if g.needs_grad(a) {
        let mut da = vec![T::zero(); m * k];
        gemm_nt(m, k, p, grad.data(), g.value(b).data(), &mut da);
        out.push((a, Tensor::from_vec(&[m, k], da).expect("shape")));
    }
    if g.needs_grad(b) {
        let mut db = vec![T::zero(); k * p];
        gemm_tn(m, k, p, g.value(a).data(), grad.data(), &mut db);
        out.push((b, Tensor::from_vec(&[k, p], db).expect("shape")));
    }
}

pub(crate) fn softmax_rows_backward<T: Real>(x: Var, y: &Tensor<T>, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    let cols = y.shape()[1];
    let mut dx = grad.clone();
    for (drow, yrow) in dx.data_mut().chunks_mut(cols).zip(y.data().chunks(cols)) {
        let inner: T = drow.iter().zip(yrow).map(|(&d, &s)| d * s).sum();
        for (d, &s) in drow.iter_mut().zip(yrow) {
            *d = s * (*d - inner);
        }
    }
    out.push((x, dx));
}
