//! im2col-lowered 2D and 3D convolution (cross-correlation, zero padding).

use crate::error::{Result, TensorError};
use crate::exec;
use crate::graph::{Graph, Op, Var};
use crate::kernels::{col2im, gemm_nn, gemm_nt, gemm_tn, im2col, ConvGeom};
use crate::scalar::Real;
use crate::tensor::Tensor;

impl<T: Real> Graph<T> {
    /// `input [N,Cin,H,W]`, `weight [Cout,Cin,kh,kw]`, `bias [Cout]` → `[N,Cout,H',W']`.
    pub fn conv2d(&mut self, input: Var, weight: Var, bias: Var, padding: usize, stride: usize) -> Result<Var> {
        const OP: &str = "conv2d";
        let xs = self.shape(input).to_vec();
        let ws = self.shape(weight).to_vec();
        if xs.len() != 4 || ws.len() != 4 {
            return Err(TensorError::dim(OP, format!("rank-4 input and weight expected, got {xs:?} and {ws:?}")));
        }
        if xs[1] != ws[1] {
            return Err(TensorError::dim(OP, format!("input has {} channels, weight expects {}", xs[1], ws[1])));
        }
        let (kh, kw) = (ws[2], ws[3]);
        if kh % 2 == 0 || kw % 2 == 0 {
            return Err(TensorError::contract(OP, format!("kernel {kh}x{kw} must have odd extents")));
        }
        if stride == 0 {
            return Err(TensorError::contract(OP, "stride must be at least 1"));
        }
        if xs[2] + 2 * padding < kh || xs[3] + 2 * padding < kw {
            return Err(TensorError::dim(OP, format!("kernel {kh}x{kw} larger than padded input {xs:?}")));
        }
        check_bias(self, OP, bias, ws[0])?;
        let geom = ConvGeom {
            channels: xs[1],
            depth: 1,
            height: xs[2],
            width: xs[3],
            kd: 1,
            kh,
            kw,
            pad_d: 0,
            pad: padding,
            stride,
        };
        let data = conv_forward(self, input, weight, bias, &geom, xs[0], ws[0]);
        let out = Tensor::from_vec(&[xs[0], ws[0], geom.out_height(), geom.out_width()], data)?;
        self.push(OP, Op::Conv { x: input, w: weight, b: bias, geom, batch: xs[0], cout: ws[0] }, out)
    }

    /// `input [N,Cin,D,H,W]`, `weight [Cout,Cin,kd,kh,kw]`, `bias [Cout]`, stride 1, same padding on all axes.
    pub fn conv3d(&mut self, input: Var, weight: Var, bias: Var, padding: usize) -> Result<Var> {
        const OP: &str = "conv3d";
        let xs = self.shape(input).to_vec();
        let ws = self.shape(weight).to_vec();
        if xs.len() != 5 || ws.len() != 5 {
            return Err(TensorError::dim(OP, format!("rank-5 input and weight expected, got {xs:?} and {ws:?}")));
        }
        if xs[1] != ws[1] {
            return Err(TensorError::dim(OP, format!("input has {} channels, weight expects {}", xs[1], ws[1])));
        }
        if ws[2..].iter().any(|k| k % 2 == 0) {
            return Err(TensorError::contract(OP, format!("kernel {:?} must have odd extents", &ws[2..])));
        }
        if (0..3).any(|a| xs[2 + a] + 2 * padding < ws[2 + a]) {
            return Err(TensorError::dim(OP, format!("kernel {:?} larger than padded input {xs:?}", &ws[2..])));
        }
        check_bias(self, OP, bias, ws[0])?;
        let geom = ConvGeom {
            channels: xs[1],
            depth: xs[2],
            height: xs[3],
            width: xs[4],
            kd: ws[2],
            kh: ws[3],
            kw: ws[4],
            pad_d: padding,
            pad: padding,
            stride: 1,
        };
        let data = conv_forward(self, input, weight, bias, &geom, xs[0], ws[0]);
        let shape = [xs[0], ws[0], geom.out_depth(), geom.out_height(), geom.out_width()];
        let out = Tensor::from_vec(&shape, data)?;
        self.push(OP, Op::Conv { x: input, w: weight, b: bias, geom, batch: xs[0], cout: ws[0] }, out)
    }
}

fn check_bias<T: Real>(g: &Graph<T>, op: &'static str, bias: Var, cout: usize) -> Result<()> {
    if g.shape(bias) != [cout] {
        return Err(TensorError::dim(op, format!("bias shape {:?}, expected [{cout}]", g.shape(bias))));
    }
    Ok(())
}

fn conv_forward<T: Real>(g: &Graph<T>, x: Var, w: Var, b: Var, geom: &ConvGeom, batch: usize, cout: usize) -> Vec<T> {
    let (xd, wd, bd) = (g.value(x).data(), g.value(w).data(), g.value(b).data());
    let (k, n, per_in) = (geom.patch_len(), geom.out_len(), geom.in_len());
    let items = exec::map_indexed(batch, |i| {
        let mut cols = vec![T::zero(); k * n];
        im2col(geom, &xd[i * per_in..(i + 1) * per_in], &mut cols);
        let mut out = vec![T::zero(); cout * n];
        gemm_nn(cout, k, n, wd, &cols, &mut out);
        for (row, &bias) in out.chunks_mut(n).zip(bd) {
            for v in row {
                *v += bias;
            }
        }
        out
    });
    items.concat()
}

struct ItemGrads<T> {
    dx: Option<Vec<T>>,
    dw: Vec<T>,
    db: Vec<T>,
}

pub(crate) fn conv_backward<T: Real>(
    g: &Graph<T>,
    [x, w, b]: [Var; 3],
    geom: &ConvGeom,
    batch: usize,
    cout: usize,
    grad: &Tensor<T>,
    out: &mut Vec<(Var, Tensor<T>)>,
) {
    let (xd, wd, gd) = (g.value(x).data(), g.value(w).data(), grad.data());
    let (k, n, per_in) = (geom.patch_len(), geom.out_len(), geom.in_len());
    let need_x = g.needs_grad(x);
    let need_w = g.needs_grad(w);
    let items = exec::map_indexed(batch, |i| {
        let gi = &gd[i * cout * n..(i + 1) * cout * n];
        let mut dw = Vec::new();
        if need_w {
            let mut cols = vec![T::zero(); k * n];
            im2col(geom, &xd[i * per_in..(i + 1) * per_in], &mut cols);
            dw = vec![T::zero(); cout * k];
            gemm_nt(cout, k, n, gi, &cols, &mut dw);
        }
        let db = gi.chunks(n).map(|row| row.iter().copied().sum()).collect();
        let dx = need_x.then(|| {
            let mut dcols = vec![T::zero(); k * n];
            gemm_tn(cout, k, n, wd, gi, &mut dcols);
            let mut dx = vec![T::zero(); per_in];
            col2im(geom, &dcols, &mut dx);
            dx
        });
        ItemGrads { dx, dw, db }
    });

    if need_x {
        let dx: Vec<T> = items.iter().flat_map(|it| it.dx.as_ref().expect("requested").iter().copied()).collect();
        out.push((x, Tensor::from_vec(g.shape(x), dx).expect("input shape")));
    }
    if need_w {
        let mut dw = vec![T::zero(); cout * k];
        for it in &items {
            for (acc, &v) in dw.iter_mut().zip(&it.dw) {
                *acc += v;
            }
        }
        out.push((w, Tensor::from_vec(g.shape(w), dw).expect("weight shape")));
    }
    if g.needs_grad(b) {
        let mut db = vec![T::zero(); cout];
        for it in &items {
            for (acc, &v) in db.iter_mut().zip(&it.db) {
                *acc += v;
            }
        }
        out.push((b, Tensor::from_vec(g.shape(b), db).expect("bias shape")));
    }
}
