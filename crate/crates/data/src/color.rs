//! BT.601 studio-range conversion on the 0..255 scale.

use crate::error::{DataError, Result};
use crate::image::{Colorspace, Image};

const Y_ROW: [f64; 3] = [65.481, 128.553, 24.966];
const CB_ROW: [f64; 3] = [-37.797, -74.203, 112.0];
const CR_ROW: [f64; 3] = [112.0, -93.786, -18.214];

fn apply(row: [f64; 3], offset: f64, r: f64, g: f64, b: f64) -> f64 {
    ((offset + row[0] * r + row[1] * g + row[2] * b) / 255.0).clamp(0.0, 1.0)
}

pub fn rgb_to_ycbcr(image: &Image) -> Result<Image> {
    if image.colorspace() != Colorspace::Rgb {
        return Err(DataError::Contract("rgb_to_ycbcr expects an RGB image".into()));
    }
    let [r, g, b] = image.planes();
    let convert = |row, offset| -> Vec<f64> {
        (0..r.len()).map(|i| apply(row, offset, r[i], g[i], b[i])).collect()
    };
    let planes = [convert(Y_ROW, 16.0), convert(CB_ROW, 128.0), convert(CR_ROW, 128.0)];
    Ok(Image::from_planes(image.width(), image.height(), planes, Colorspace::YCbCr))
}

/// Luminance plane, computed for RGB input and taken as-is from YCbCr input.
pub fn y_channel(image: &Image) -> Vec<f64> {
    match image.colorspace() {
        Colorspace::YCbCr => image.plane(0).to_vec(),
        Colorspace::Rgb => {
            let [r, g, b] = image.planes();
            (0..r.len()).map(|i| apply(Y_ROW, 16.0, r[i], g[i], b[i])).collect()
        }
    }
}
