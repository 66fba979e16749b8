use crate::error::{DataError, Result};
use crate::image::Image;

const A: f64 = -0.5;

/// Keys cubic convolution kernel with `a = -0.5`.
pub fn cubic(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        ((A + 2.0) * t - (A + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        ((A * t - 5.0 * A) * t + 8.0 * A) * t - 4.0 * A
    } else {
        0.0
    }
}

// Per-destination tap indices (edge clamped) and weights along one axis.
fn axis_taps(src_len: usize, dst_len: usize) -> Vec<([usize; 4], [f64; 4])> {
    let scale = src_len as f64 / dst_len as f64;
    (0..dst_len)
        .map(|d| {
            let pos = (d as f64 + 0.5) * scale - 0.5;
            let base = pos.floor() as isize;
            let mut idx = [0; 4];
            let mut w = [0.0; 4];
            for k in 0..4 {
                let i = base - 1 + k as isize;
                idx[k] = i.clamp(0, src_len as isize - 1) as usize;
                w[k] = cubic(pos - i as f64);
            }
            (idx, w)
        })
        .collect()
}

/// Separable bicubic resampling, clamped into `[0, 1]` after both passes.
pub fn bicubic_resize(image: &Image, width: usize, height: usize) -> Image {
    assert!(width > 0 && height > 0, "resize target must be positive");
    let (sw, sh) = (image.width(), image.height());
    if (sw, sh) == (width, height) {
        return image.clone();
    }
    let xs = axis_taps(sw, width);
    let ys = axis_taps(sh, height);
    let planes = image.map_planes(|p| {
        let mut rows = vec![0.0; width * sh];
        for y in 0..sh {
            let src = &p[y * sw..(y + 1) * sw];
            for (x, (idx, w)) in xs.iter().enumerate() {
                rows[y * width + x] = (0..4).map(|k| w[k] * src[idx[k]]).sum();
            }
        }
        let mut out = vec![0.0; width * height];
        for (y, (idx, w)) in ys.iter().enumerate() {
            for x in 0..width {
                let v: f64 = (0..4).map(|k| w[k] * rows[idx[k] * width + x]).sum();
                out[y * width + x] = v.clamp(0.0, 1.0);
            }
        }
        out
    });
    Image::from_planes(width, height, planes, image.colorspace())
}

/// Normalized 1-D Gaussian taps of odd length `ksize`. `sigma == 0` gives the delta kernel.
pub fn gaussian_kernel(ksize: usize, sigma: f64) -> Result<Vec<f64>> {
    if ksize % 2 == 0 || !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(DataError::Contract(format!("gaussian kernel needs odd size and sigma >= 0, got {ksize}, {sigma}")));
    }
    let r = (ksize / 2) as f64;
    let mut k: Vec<f64> = (0..ksize)
        .map(|i| {
            let d = i as f64 - r;
            if sigma == 0.0 {
                if d == 0.0 { 1.0 } else { 0.0 }
            } else {
                (-d * d / (2.0 * sigma * sigma)).exp()
            }
        })
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    Ok(k)
}

/// Separable normalized Gaussian blur with edge-clamped borders.
pub fn gaussian_blur(image: &Image, ksize: usize, sigma: f64) -> Result<Image> {
    let k = gaussian_kernel(ksize, sigma)?;
    let r = (ksize / 2) as isize;
    let (w, h) = (image.width() as isize, image.height() as isize);
    let planes = image.map_planes(|p| {
        let mut rows = vec![0.0; p.len()];
        for y in 0..h {
            for x in 0..w {
                rows[(y * w + x) as usize] = (0..ksize as isize)
                    .map(|i| k[i as usize] * p[(y * w + (x + i - r).clamp(0, w - 1)) as usize])
                    .sum();
            }
        }
        let mut out = vec![0.0; p.len()];
        for y in 0..h {
            for x in 0..w {
                let v: f64 = (0..ksize as isize)
                    .map(|i| k[i as usize] * rows[((y + i - r).clamp(0, h - 1) * w + x) as usize])
                    .sum();
                out[(y * w + x) as usize] = v.clamp(0.0, 1.0);
            }
        }
        out
    });
    Ok(Image::from_planes(image.width(), image.height(), planes, image.colorspace()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_interpolates_at_integers() {
        assert_eq!(cubic(0.0), 1.0);
        assert_eq!(cubic(1.0), 0.0);
        assert_eq!(cubic(2.0), 0.0);
        for t in [0.1, 0.25, 0.5, 0.9] {
            let s = cubic(t + 1.0) + cubic(t) + cubic(1.0 - t) + cubic(2.0 - t);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn even_kernel_rejected() {
        assert!(gaussian_kernel(4, 1.0).is_err());
        assert!(gaussian_kernel(5, -1.0).is_err());
    }
}
