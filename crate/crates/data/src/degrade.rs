use std::fmt;
use std::str::FromStr;

use crate::error::{DataError, Result};
use crate::filter::{bicubic_resize, gaussian_blur};
use crate::image::Image;

pub const SUPPORTED_SCALES: [usize; 4] = [2, 3, 4, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegradationKind {
    /// Bicubic downscaling.
    Bi,
    /// Gaussian blur, then bicubic downscaling.
    Bd,
}

impl DegradationKind {
    pub fn tag(self) -> &'static str {
        match self {
            DegradationKind::Bi => "bi",
            DegradationKind::Bd => "bd",
        }
    }
}

impl fmt::Display for DegradationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DegradationKind {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bi" => Ok(DegradationKind::Bi),
            "bd" => Ok(DegradationKind::Bd),
            other => Err(DataError::Contract(format!("unknown degradation {other:?}, expected bi or bd"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegradationSpec {
    pub kind: DegradationKind,
    pub scale: usize,
    /// Blur taps per axis, used by BD only.
    pub kernel_size: usize,
    pub sigma: f64,
}

impl DegradationSpec {
    pub const BD_KERNEL: usize = 7;
    pub const BD_SIGMA: f64 = 1.6;

    pub fn bi(scale: usize) -> Self {
        Self::new(DegradationKind::Bi, scale)
    }

    pub fn bd(scale: usize) -> Self {
        Self::new(DegradationKind::Bd, scale)
    }

    pub fn new(kind: DegradationKind, scale: usize) -> Self {
        DegradationSpec { kind, scale, kernel_size: Self::BD_KERNEL, sigma: Self::BD_SIGMA }
    }

    pub fn validate(&self) -> Result<()> {
        if !SUPPORTED_SCALES.contains(&self.scale) {
            return Err(DataError::Contract(format!("scale {} not in {SUPPORTED_SCALES:?}", self.scale)));
        }
        if self.kind == DegradationKind::Bd && (self.kernel_size < 3 || self.kernel_size % 2 == 0 || !(self.sigma > 0.0)) {
            return Err(DataError::Contract(format!(
                "BD needs an odd kernel of at least 3 taps and sigma > 0, got {} and {}",
                self.kernel_size, self.sigma
            )));
        }
        Ok(())
    }
}

/// Synthesize the LR counterpart of `hr`, after cropping `hr` to multiples of the scale.
pub fn degrade(hr: &Image, spec: &DegradationSpec) -> Result<Image> {
    spec.validate()?;
    let s = spec.scale;
    let hr = hr.crop_to_multiple(s)?;
    let source = match spec.kind {
        DegradationKind::Bi => hr,
        DegradationKind::Bd => gaussian_blur(&hr, spec.kernel_size, spec.sigma)?,
    };
    Ok(bicubic_resize(&source, source.width() / s, source.height() / s))
}

/// Bicubic `s`x upscale, the usual interpolation baseline.
pub fn upscale_bicubic(lr: &Image, s: usize) -> Image {
    bicubic_resize(lr, lr.width() * s, lr.height() * s)
}
