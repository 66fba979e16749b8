use han_data::{y_channel, Image};

use crate::error::{MetricError, Result};

pub const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const C1: f64 = 0.01 * 0.01;
const C2: f64 = 0.03 * 0.03;

// Cropped luminance planes of both images, plus their extents.
fn cropped_y(sr: &Image, hr: &Image, crop: usize) -> Result<(Vec<f64>, Vec<f64>, usize, usize)> {
    let (w, h) = (hr.width(), hr.height());
    if (sr.width(), sr.height()) != (w, h) {
        return Err(MetricError::Contract(format!("extents differ: {}x{} vs {w}x{h}", sr.width(), sr.height())));
    }
    if 2 * crop >= w || 2 * crop >= h {
        return Err(MetricError::Contract(format!("crop {crop} leaves nothing of {w}x{h}")));
    }
    let (cw, ch) = (w - 2 * crop, h - 2 * crop);
    let cut = |plane: Vec<f64>| -> Vec<f64> {
        (crop..h - crop).flat_map(|y| plane[y * w + crop..y * w + crop + cw].to_vec()).collect()
    };
    Ok((cut(y_channel(sr)), cut(y_channel(hr)), cw, ch))
}

/// Luminance PSNR in dB with peak 1.0 after removing `crop` pixels per side.
/// A perfect match yields `f64::INFINITY`.
pub fn psnr_y(sr: &Image, hr: &Image, crop: usize) -> Result<f64> {
    let (a, b, _, _) = cropped_y(sr, hr, crop)?;
    let mse = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    Ok(if mse == 0.0 { f64::INFINITY } else { -10.0 * mse.log10() })
}

/// Normalized 1-D Gaussian taps of the SSIM window.
pub fn ssim_window() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - r;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = w.iter().sum();
    w.map(|v| v / total)
}

// Separable weighted sum over every fully contained window.
fn filter_valid(src: &[f64], w: usize, h: usize, k: &[f64]) -> Vec<f64> {
    let n = k.len();
    let (ow, oh) = (w - n + 1, h - n + 1);
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            rows[y * ow + x] = (0..n).map(|i| k[i] * src[y * w + x + i]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..n).map(|i| k[i] * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Single-scale luminance SSIM averaged over valid 11x11 Gaussian windows.
pub fn ssim_y(sr: &Image, hr: &Image, crop: usize) -> Result<f64> {
    let (a, b, w, h) = cropped_y(sr, hr, crop)?;
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricError::Contract(format!("{w}x{h} after cropping is smaller than the SSIM window")));
    }
    let k = ssim_window();
    let prod = |f: fn(f64, f64) -> f64| -> Vec<f64> { a.iter().zip(&b).map(|(&x, &y)| f(x, y)).collect() };
    let mu_a = filter_valid(&a, w, h, &k);
    let mu_b = filter_valid(&b, w, h, &k);
    let aa = filter_valid(&prod(|x, _| x * x), w, h, &k);
    let bb = filter_valid(&prod(|_, y| y * y), w, h, &k);
    let ab = filter_valid(&prod(|x, y| x * y), w, h, &k);
    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let (va, vb, cov) = (aa[i] - ma * ma, bb[i] - mb * mb, ab[i] - ma * mb);
            ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) / ((ma * ma + mb * mb + C1) * (va + vb + C2))
        })
        .sum();
    Ok(total / mu_a.len() as f64)
}
