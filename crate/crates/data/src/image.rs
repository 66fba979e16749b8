use han_core::{Real, Tensor};

use crate::error::{DataError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Colorspace {
    Rgb,
    YCbCr,
}

/// Three planar rasters with samples in `[0, 1]`, row-major, `plane[y * width + x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    planes: [Vec<f64>; 3],
    colorspace: Colorspace,
}

impl Image {
    pub fn new(width: usize, height: usize, planes: [Vec<f64>; 3], colorspace: Colorspace) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(DataError::Contract(format!("image extents {width}x{height} must be positive")));
        }
        for p in &planes {
            if p.len() != width * height {
                return Err(DataError::Contract(format!(
                    "plane holds {} samples, {width}x{height} needs {}",
                    p.len(),
                    width * height
                )));
            }
            if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(DataError::Contract(format!("sample {v} outside [0, 1]")));
            }
        }
        Ok(Image { width, height, planes, colorspace })
    }

    /// RGB image from `f(channel, x, y)`; values are clamped into range.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image extents must be positive");
        let mut plane = |c| {
            let mut p = Vec::with_capacity(width * height);
            for y in 0..height {
                for x in 0..width {
                    p.push(f(c, x, y).clamp(0.0, 1.0));
                }
            }
            p
        };
        Image { width, height, planes: [plane(0), plane(1), plane(2)], colorspace: Colorspace::Rgb }
    }

    pub fn constant(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        Self::from_fn(width, height, |c, _, _| rgb[c])
    }

    /// Internal constructor for filters whose output is already in range.
    pub(crate) fn from_planes(width: usize, height: usize, planes: [Vec<f64>; 3], colorspace: Colorspace) -> Self {
        debug_assert!(planes.iter().all(|p| p.len() == width * height));
        Image { width, height, planes, colorspace }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn colorspace(&self) -> Colorspace {
        self.colorspace
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        &self.planes[c]
    }

    pub fn planes(&self) -> &[Vec<f64>; 3] {
        &self.planes
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.planes[c][y * self.width + x]
    }

    pub(crate) fn map_planes(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> [Vec<f64>; 3] {
        [f(&self.planes[0]), f(&self.planes[1]), f(&self.planes[2])]
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Image> {
        if width == 0 || height == 0 || x0 + width > self.width || y0 + height > self.height {
            return Err(DataError::Contract(format!(
                "crop {width}x{height}+{x0}+{y0} outside {}x{}",
                self.width, self.height
            )));
        }
        let planes = self.map_planes(|p| {
            let mut out = Vec::with_capacity(width * height);
            for y in y0..y0 + height {
                out.extend_from_slice(&p[y * self.width + x0..y * self.width + x0 + width]);
            }
            out
        });
        Ok(Image::from_planes(width, height, planes, self.colorspace))
    }

    /// Top-left crop whose extents are multiples of `s`.
    pub fn crop_to_multiple(&self, s: usize) -> Result<Image> {
        if s == 0 || self.width < s || self.height < s {
            return Err(DataError::Contract(format!("{}x{} has no multiple of {s}", self.width, self.height)));
        }
        let (w, h) = (self.width / s * s, self.height / s * s);
        if (w, h) == (self.width, self.height) {
            return Ok(self.clone());
        }
        self.crop(0, 0, w, h)
    }

    /// Snap every sample to the nearest multiple of 1/255, as an 8-bit round trip would.
    pub fn quantized(&self) -> Image {
        let planes = self.map_planes(|p| p.iter().map(|&v| to_u8(v) as f64 / 255.0).collect());
        Image::from_planes(self.width, self.height, planes, self.colorspace)
    }

    /// `[1, 3, H, W]` tensor of the planes.
    pub fn to_tensor<T: Real>(&self) -> Tensor<T> {
        batch_tensor(std::slice::from_ref(self)).expect("single image batch")
    }

    /// Item `index` of a `[B, 3, H, W]` tensor, clamped into `[0, 1]`.
    pub fn from_tensor<T: Real>(t: &Tensor<T>, index: usize) -> Result<Image> {
        let s = t.shape();
        if s.len() != 4 || s[1] != 3 || index >= s[0] {
            return Err(DataError::Contract(format!("cannot take image {index} from tensor {s:?}")));
        }
        let (h, w) = (s[2], s[3]);
        let item = &t.data()[index * 3 * h * w..(index + 1) * 3 * h * w];
        if item.iter().any(|v| !v.is_finite()) {
            return Err(DataError::Contract("tensor holds non-finite samples".into()));
        }
        let plane = |c: usize| item[c * h * w..(c + 1) * h * w].iter().map(|v| v.as_f64().clamp(0.0, 1.0)).collect();
        Ok(Image::from_planes(w, h, [plane(0), plane(1), plane(2)], Colorspace::Rgb))
    }
}

/// Stack equal-size images into a `[B, 3, H, W]` tensor.
pub fn batch_tensor<T: Real>(images: &[Image]) -> Result<Tensor<T>> {
    let Some(first) = images.first() else {
        return Err(DataError::Contract("empty image batch".into()));
    };
    let (w, h) = (first.width, first.height);
    let mut data = Vec::with_capacity(images.len() * 3 * w * h);
    for im in images {
        if (im.width, im.height) != (w, h) {
            return Err(DataError::Contract(format!("batch mixes {w}x{h} and {}x{}", im.width, im.height)));
        }
        for p in &im.planes {
            data.extend(p.iter().map(|&v| T::of(v)));
        }
    }
    Tensor::from_vec(&[images.len(), 3, h, w], data).map_err(|e| DataError::Contract(e.to_string()))
}

pub(crate) fn to_u8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_bad_lengths() {
        assert!(Image::new(1, 1, [vec![1.5], vec![0.0], vec![0.0]], Colorspace::Rgb).is_err());
        assert!(Image::new(2, 1, [vec![0.0], vec![0.0], vec![0.0]], Colorspace::Rgb).is_err());
        assert!(Image::new(0, 1, [vec![], vec![], vec![]], Colorspace::Rgb).is_err());
    }

    #[test]
    fn crop_to_multiple_drops_remainder() {
        let im = Image::from_fn(7, 5, |c, x, y| (c + x + y) as f64 / 20.0);
        let c = im.crop_to_multiple(3).unwrap();
        assert_eq!((c.width(), c.height()), (6, 3));
        assert_eq!(c.get(1, 5, 2), im.get(1, 5, 2));
    }

    #[test]
    fn tensor_round_trip() {
        let im = Image::from_fn(4, 3, |c, x, y| (c * 12 + y * 4 + x) as f64 / 40.0);
        let t = im.to_tensor::<f64>();
        assert_eq!(t.shape(), &[1, 3, 3, 4]);
        assert_eq!(Image::from_tensor(&t, 0).unwrap(), im);
    }
}
