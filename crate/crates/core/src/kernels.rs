//! Dense kernels: row-major GEMM variants and volumetric im2col/col2im.
//!
//! 2D convolution is the depth-1 special case of the volumetric layout, so a
//! single lowering serves both `conv2d` and `conv3d`.

use crate::scalar::Real;

#[inline]
pub(crate) fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [T::zero(); 8];
    let xc = x.chunks_exact(8);
    let yc = y.chunks_exact(8);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        for l in 0..8 {
            acc[l] += a[l] * b[l];
        }
    }
    let mut tail = T::zero();
    for (&a, &b) in xr.iter().zip(yr) {
        tail += a * b;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[inline]
fn axpy4<T: Real>(coef: [T; 4], src: &[T], dst: [&mut [T]; 4]) {
    let [d0, d1, d2, d3] = dst;
    for ((((x0, x1), x2), x3), &s) in d0.iter_mut().zip(d1.iter_mut()).zip(d2.iter_mut()).zip(d3.iter_mut()).zip(src) {
        *x0 += coef[0] * s;
        *x1 += coef[1] * s;
        *x2 += coef[2] * s;
        *x3 += coef[3] * s;
    }
}

#[inline]
fn axpy<T: Real>(coef: T, src: &[T], dst: &mut [T]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += coef * s;
    }
}

fn four_rows<T>(block: &mut [T], n: usize) -> [&mut [T]; 4] {
    let (r0, rest) = block.split_at_mut(n);
    let (r1, rest) = rest.split_at_mut(n);
    let (r2, r3) = rest.split_at_mut(n);
    [r0, r1, r2, r3]
}

/// `c[m,n] = a[m,k] · b[k,n]`
pub fn gemm_nn<T: Real>(m: usize, k: usize, n: usize, a: &[T], b: &[T], c: &mut [T]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    c.fill(T::zero());
    let mut i = 0;
    for block in c.chunks_mut(4 * n) {
        let rows = block.len() / n;
        if rows == 4 {
            let [c0, c1, c2, c3] = four_rows(block, n);
            for p in 0..k {
                let coef = [a[i * k + p], a[(i + 1) * k + p], a[(i + 2) * k + p], a[(i + 3) * k + p]];
                axpy4(coef, &b[p * n..(p + 1) * n], [&mut *c0, &mut *c1, &mut *c2, &mut *c3]);
            }
        } else {
            for (r, crow) in block.chunks_mut(n).enumerate() {
                for p in 0..k {
                    axpy(a[(i + r) * k + p], &b[p * n..(p + 1) * n], crow);
                }
            }
        }
        i += rows;
    }
}

/// `c[m,n] = a[m,p] · b[n,p]ᵀ`
pub fn gemm_nt<T: Real>(m: usize, n: usize, p: usize, a: &[T], b: &[T], c: &mut [T]) {
    debug_assert_eq!(a.len(), m * p);
    debug_assert_eq!(b.len(), n * p);
    debug_assert_eq!(c.len(), m * n);
    for (arow, crow) in a.chunks(p).zip(c.chunks_mut(n)) {
        for (cv, brow) in crow.iter_mut().zip(b.chunks(p)) {
            *cv = dot(arow, brow);
        }
    }
}

/// `c[k,n] = a[m,k]ᵀ · g[m,n]`
pub fn gemm_tn<T: Real>(m: usize, k: usize, n: usize, a: &[T], g: &[T], c: &mut [T]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(g.len(), m * n);
    debug_assert_eq!(c.len(), k * n);
    c.fill(T::zero());
    for i in 0..m {
        let grow = &g[i * n..(i + 1) * n];
        let arow = &a[i * k..(i + 1) * k];
        let mut kk = 0;
        for block in c.chunks_mut(4 * n) {
            let rows = block.len() / n;
            if rows == 4 {
                let coef = [arow[kk], arow[kk + 1], arow[kk + 2], arow[kk + 3]];
                axpy4(coef, grow, four_rows(block, n));
            } else {
                for (r, crow) in block.chunks_mut(n).enumerate() {
                    axpy(arow[kk + r], grow, crow);
                }
            }
            kk += rows;
        }
    }
}

/// Geometry of one convolution over a `[channels, depth, height, width]` volume.
///
/// Depth always uses stride 1; height and width share `stride`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeom {
    pub channels: usize,
    pub depth: usize,
    pub height: usize,
    pub width: usize,
    pub kd: usize,
    pub kh: usize,
    pub kw: usize,
    pub pad_d: usize,
    pub pad: usize,
    pub stride: usize,
}

impl ConvGeom {
    pub fn out_depth(&self) -> usize {
        self.depth + 2 * self.pad_d + 1 - self.kd
    }

    pub fn out_height(&self) -> usize {
        (self.height + 2 * self.pad - self.kh) / self.stride + 1
    }

    pub fn out_width(&self) -> usize {
        (self.width + 2 * self.pad - self.kw) / self.stride + 1
    }

    pub fn in_len(&self) -> usize {
        self.channels * self.depth * self.height * self.width
    }

    /// Rows of the lowered matrix.
    pub fn patch_len(&self) -> usize {
        self.channels * self.kd * self.kh * self.kw
    }

    /// Columns of the lowered matrix.
    pub fn out_len(&self) -> usize {
        self.out_depth() * self.out_height() * self.out_width()
    }

    /// Output positions `[lo, hi)` along one axis whose input tap `o*stride + tap - pad` is in range.
    fn valid_range(extent: usize, out: usize, tap: usize, pad: usize, stride: usize) -> (usize, usize) {
        let lo = if pad > tap { (pad - tap).div_ceil(stride) } else { 0 };
        if extent + pad <= tap {
            return (0, 0);
        }
        let hi = ((extent - 1 + pad - tap) / stride + 1).min(out);
        (lo.min(hi), hi)
    }
}

/// Lower one input volume to a `[patch_len, out_len]` matrix.
pub fn im2col<T: Real>(g: &ConvGeom, x: &[T], cols: &mut [T]) {
    debug_assert_eq!(x.len(), g.in_len());
    debug_assert_eq!(cols.len(), g.patch_len() * g.out_len());
    let (od, oh, ow) = (g.out_depth(), g.out_height(), g.out_width());
    let plane = oh * ow;
    let mut row = 0;
    for c in 0..g.channels {
        for z in 0..g.kd {
            for ky in 0..g.kh {
                let (ylo, yhi) = ConvGeom::valid_range(g.height, oh, ky, g.pad, g.stride);
                for kx in 0..g.kw {
                    let (xlo, xhi) = ConvGeom::valid_range(g.width, ow, kx, g.pad, g.stride);
                    let dst = &mut cols[row * g.out_len()..(row + 1) * g.out_len()];
                    row += 1;
                    for d in 0..od {
                        let out_plane = &mut dst[d * plane..(d + 1) * plane];
                        let iz = (d + z) as isize - g.pad_d as isize;
                        if iz < 0 || iz as usize >= g.depth {
                            out_plane.fill(T::zero());
                            continue;
                        }
                        let src_plane = &x[((c * g.depth + iz as usize) * g.height) * g.width..];
                        for oy in 0..oh {
                            let out_row = &mut out_plane[oy * ow..(oy + 1) * ow];
                            if oy < ylo || oy >= yhi {
                                out_row.fill(T::zero());
                                continue;
                            }
                            let iy = oy * g.stride + ky - g.pad;
                            let src_row = &src_plane[iy * g.width..(iy + 1) * g.width];
                            out_row[..xlo].fill(T::zero());
                            out_row[xhi..].fill(T::zero());
                            if g.stride == 1 {
                                let start = xlo + kx - g.pad;
                                out_row[xlo..xhi].copy_from_slice(&src_row[start..start + (xhi - xlo)]);
                            } else {
                                for ox in xlo..xhi {
                                    out_row[ox] = src_row[ox * g.stride + kx - g.pad];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Scatter-add a `[patch_len, out_len]` matrix back onto an input volume.
pub fn col2im<T: Real>(g: &ConvGeom, cols: &[T], x: &mut [T]) {
    debug_assert_eq!(x.len(), g.in_len());
    debug_assert_eq!(cols.len(), g.patch_len() * g.out_len());
    let (od, oh, ow) = (g.out_depth(), g.out_height(), g.out_width());
    let plane = oh * ow;
    let mut row = 0;
    for c in 0..g.channels {
        for z in 0..g.kd {
            for ky in 0..g.kh {
                let (ylo, yhi) = ConvGeom::valid_range(g.height, oh, ky, g.pad, g.stride);
                for kx in 0..g.kw {
                    let (xlo, xhi) = ConvGeom::valid_range(g.width, ow, kx, g.pad, g.stride);
                    let src = &cols[row * g.out_len()..(row + 1) * g.out_len()];
                    row += 1;
                    for d in 0..od {
                        let iz = (d + z) as isize - g.pad_d as isize;
                        if iz < 0 || iz as usize >= g.depth {
                            continue;
                        }
                        let base = ((c * g.depth + iz as usize) * g.height) * g.width;
                        for oy in ylo..yhi {
                            let iy = oy * g.stride + ky - g.pad;
                            let dst_row = &mut x[base + iy * g.width..base + (iy + 1) * g.width];
                            let src_row = &src[d * plane + oy * ow..d * plane + (oy + 1) * ow];
                            for ox in xlo..xhi {
                                dst_row[ox * g.stride + kx - g.pad] += src_row[ox];
                            }
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mm(m: usize, k: usize, n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                for p in 0..k {
                    c[i * n + j] += a[i * k + p] * b[p * n + j];
                }
            }
        }
        c
    }

    fn transpose(r: usize, c: usize, x: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                t[j * r + i] = x[i * c + j];
            }
        }
        t
    }

    fn seq(len: usize, salt: f64) -> Vec<f64> {
        (0..len).map(|i| ((i as f64 * 0.37 + salt).sin() * 3.0).round() / 2.0).collect()
    }

    #[test]
    fn gemm_variants_agree_with_naive() {
        for &(m, k, n) in &[(1, 1, 1), (3, 5, 7), (4, 9, 17), (9, 4, 13), (16, 27, 33)] {
            let a = seq(m * k, 0.1);
            let b = seq(k * n, 1.3);
            let want = naive_mm(m, k, n, &a, &b);

            let mut c = vec![0.0; m * n];
            gemm_nn(m, k, n, &a, &b, &mut c);
            assert_eq!(c, want);

            let bt = transpose(k, n, &b);
            gemm_nt(m, n, k, &a, &bt, &mut c);
            assert_eq!(c, want);

            let at = transpose(m, k, &a);
            gemm_tn(k, m, n, &at, &b, &mut c);
            assert_eq!(c, want);
        }
    }

    #[test]
    fn im2col_col2im_are_adjoint() {
        // <im2col(x), y> == <x, col2im(y)> for every geometry.
        let geoms = [
            ConvGeom { channels: 2, depth: 1, height: 5, width: 4, kd: 1, kh: 3, kw: 3, pad_d: 0, pad: 1, stride: 1 },
            ConvGeom { channels: 1, depth: 1, height: 7, width: 6, kd: 1, kh: 3, kw: 3, pad_d: 0, pad: 0, stride: 2 },
            ConvGeom { channels: 1, depth: 4, height: 3, width: 5, kd: 3, kh: 3, kw: 3, pad_d: 1, pad: 1, stride: 1 },
            ConvGeom { channels: 3, depth: 1, height: 6, width: 6, kd: 1, kh: 5, kw: 5, pad_d: 0, pad: 2, stride: 3 },
        ];
        for g in geoms {
            let x = seq(g.in_len(), 0.7);
            let y = seq(g.patch_len() * g.out_len(), 2.1);
            let mut cols = vec![0.0; y.len()];
            im2col(&g, &x, &mut cols);
            let mut back = vec![0.0; x.len()];
            col2im(&g, &y, &mut back);
            let lhs: f64 = cols.iter().zip(&y).map(|(a, b)| a * b).sum();
            let rhs: f64 = x.iter().zip(&back).map(|(a, b)| a * b).sum();
            assert!((lhs - rhs).abs() < 1e-9, "{g:?}: {lhs} vs {rhs}");
        }
    }
}
