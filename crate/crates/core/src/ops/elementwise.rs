use crate::error::{Result, TensorError};
use crate::graph::{Graph, Op, Var};
use crate::scalar::Real;
use crate::tensor::Tensor;

fn same_shape<T: Real>(g: &Graph<T>, op: &'static str, a: Var, b: Var) -> Result<()> {
    if g.shape(a) != g.shape(b) {
        return Err(TensorError::dim(op, format!("{:?} vs {:?}", g.shape(a), g.shape(b))));
    }
    Ok(())
}

fn zip_with<T: Real>(a: &Tensor<T>, b: &Tensor<T>, f: impl Fn(T, T) -> T) -> Tensor<T> {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Tensor::from_vec(a.shape(), data).expect("shape preserved")
}

impl<T: Real> Graph<T> {
    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        same_shape(self, "add", a, b)?;
        let out = zip_with(self.value(a), self.value(b), |x, y| x + y);
        self.push("add", Op::Add(a, b), out)
    }

    /// Elementwise product of equal-shape tensors.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        same_shape(self, "mul", a, b)?;
        let out = zip_with(self.value(a), self.value(b), |x, y| x * y);
        self.push("mul", Op::Mul(a, b), out)
    }

    /// `s · x` for a one-element (learnable) scalar `s`.
    pub fn scale(&mut self, x: Var, s: Var) -> Result<Var> {
        let Some(factor) = self.value(s).item() else {
            return Err(TensorError::dim("scale", format!("scalar expected, got {:?}", self.shape(s))));
        };
        let out = self.value(x).map(|v| factor * v);
        self.push("scale", Op::Scale { x, s }, out)
    }

    /// `x[n,c,h,w] · gate[n,c,0,0]`
    pub fn mul_channel(&mut self, x: Var, gate: Var) -> Result<Var> {
        let xs = self.shape(x).to_vec();
        let gs = self.shape(gate);
        if xs.len() != 4 || gs != [xs[0], xs[1], 1, 1] {
            return Err(TensorError::dim("mul_channel", format!("{xs:?} with gate {gs:?}")));
        }
        let plane = xs[2] * xs[3];
        let gate_v = self.value(gate).data();
        let mut out = self.value(x).clone();
        for (chunk, &gv) in out.data_mut().chunks_mut(plane).zip(gate_v) {
            for v in chunk {
                *v *= gv;
            }
        }
        self.push("mul_channel", Op::MulChannel { x, gate }, out)
    }
}

pub(crate) fn mul_backward<T: Real>(g: &Graph<T>, a: Var, b: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    if g.needs_grad(a) {
        out.push((a, zip_with(grad, g.value(b), |x, y| x * y)));
    }
    if g.needs_grad(b) {
        out.push((b, zip_with(grad, g.value(a), |x, y| x * y)));
    }
}

pub(crate) fn scale_backward<T: Real>(g: &Graph<T>, x: Var, s: Var, grad: &Tensor<T>, out: &mut Vec<(Var, Tensor<T>)>) {
    if g.needs_grad(x) {
        let factor = g.value(s).data()[0];
        out.push((x, grad.map(|v| factor * v)));
    }
    if g.needs_grad(s) {
        let ds: T = grad.data().iter().zip(g.value(x).data()).map(|(&a, &b)| a * b).sum();
        out.push((s, Tensor::from_vec(g.shape(s), vec![ds]).expect("scalar")));
    }
}

pub(crate) fn mul_channel_backward<T: Real>(
    g: &Graph<T>,
    x: Var,
    gate: Var,
    grad: &Tensor<T>,
    out: &mut Vec<(Var, Tensor<T>)>,
) {
    let xs = g.shape(x);
    let plane = xs[2] * xs[3];
    let gate_v = g.value(gate).data();
    if g.needs_grad(x) {
        let mut dx = grad.clone();
        for (chunk, &gv) in dx.data_mut().chunks_mut(plane).zip(gate_v) {
            for v in chunk {
                *v *= gv;
            }
        }
        out.push((x, dx));
    }
    if g.needs_grad(gate) {
        let dgate: Vec<T> = grad
            .data()
            .chunks(plane)
            .zip(g.value(x).data().chunks(plane))
            .map(|(gc, xc)| gc.iter().zip(xc).map(|(&a, &b)| a * b).sum())
            .collect();
        out.push((gate, Tensor::from_vec(g.shape(gate), dgate).expect("gate shape")));
    }
}
