//! Direct-loop convolutions, independent of the im2col path.

use crate::error::{Result, TensorError};
use crate::scalar::Real;
use crate::tensor::Tensor;

pub fn conv2d_direct<T: Real>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>, pad: usize, stride: usize) -> Result<Tensor<T>> {
    let (xs, ws) = (x.shape(), w.shape());
    if xs.len() != 4 || ws.len() != 4 || xs[1] != ws[1] {
        return Err(TensorError::dim("conv2d_direct", format!("{xs:?} with {ws:?}")));
    }
    let (n, cin, h, wd) = (xs[0], xs[1], xs[2], xs[3]);
    let (cout, kh, kw) = (ws[0], ws[2], ws[3]);
    let oh = (h + 2 * pad - kh) / stride + 1;
    let ow = (wd + 2 * pad - kw) / stride + 1;
    let mut out = Tensor::zeros(&[n, cout, oh, ow]);
    let (xd, wdat, bd) = (x.data(), w.data(), b.data());
    let od = out.data_mut();
    for bi in 0..n {
        for co in 0..cout {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = bd[co];
                    for ci in 0..cin {
                        for ky in 0..kh {
                            for kx in 0..kw {
                                let iy = (oy * stride + ky) as isize - pad as isize;
                                let ix = (ox * stride + kx) as isize - pad as isize;
                                if iy < 0 || ix < 0 || iy as usize >= h || ix as usize >= wd {
                                    continue;
                                }
                                acc += xd[((bi * cin + ci) * h + iy as usize) * wd + ix as usize]
                                    * wdat[((co * cin + ci) * kh + ky) * kw + kx];
                            }
                        }
                    }
                    od[((bi * cout + co) * oh + oy) * ow + ox] = acc;
                }
            }
        }
    }
    Ok(out)
}

pub fn conv3d_direct<T: Real>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>, pad: usize) -> Result<Tensor<T>> {
    let (xs, ws) = (x.shape(), w.shape());
    if xs.len() != 5 || ws.len() != 5 || xs[1] != ws[1] {
        return Err(TensorError::dim("conv3d_direct", format!("{xs:?} with {ws:?}")));
    }
    let (n, cin, d, h, wd) = (xs[0], xs[1], xs[2], xs[3], xs[4]);
    let (cout, kd, kh, kw) = (ws[0], ws[2], ws[3], ws[4]);
    let (od_, oh, ow) = (d + 2 * pad - kd + 1, h + 2 * pad - kh + 1, wd + 2 * pad - kw + 1);
    let mut out = Tensor::zeros(&[n, cout, od_, oh, ow]);
    let (xd, wdat, bd) = (x.data(), w.data(), b.data());
    let o = out.data_mut();
    let inside = |v: isize, ext: usize| v >= 0 && (v as usize) < ext;
    for bi in 0..n {
        for co in 0..cout {
            for oz in 0..od_ {
                for oy in 0..oh {
                    for ox in 0..ow {
                        let mut acc = bd[co];
                        for ci in 0..cin {
                            for kz in 0..kd {
                                for ky in 0..kh {
                                    for kx in 0..kw {
                                        let iz = (oz + kz) as isize - pad as isize;
                                        let iy = (oy + ky) as isize - pad as isize;
                                        let ix = (ox + kx) as isize - pad as isize;
                                        if !(inside(iz, d) && inside(iy, h) && inside(ix, wd)) {
                                            continue;
                                        }
                                        let xi = (((bi * cin + ci) * d + iz as usize) * h + iy as usize) * wd + ix as usize;
                                        let wi = (((co * cin + ci) * kd + kz) * kh + ky) * kw + kx;
                                        acc += xd[xi] * wdat[wi];
                                    }
                                }
                            }
                        }
                        o[(((bi * cout + co) * od_ + oz) * oh + oy) * ow + ox] = acc;
                    }
                }
            }
        }
    }
    Ok(out)
}
