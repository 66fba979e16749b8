use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::error::{DataError, Result};
use crate::image::{to_u8, Colorspace, Image};

/// Decode an 8-bit RGB PNG; samples map to `v / 255`.
pub fn decode_png(bytes: &[u8]) -> Result<Image> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| DataError::Decode(e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(DataError::Unsupported(format!(
            "{:?} at {:?} bits, expected 8-bit RGB",
            info.color_type, info.bit_depth
        )));
    }
    let size = reader.output_buffer_size().ok_or_else(|| DataError::Decode("image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| DataError::Decode(e.to_string()))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let mut planes = [Vec::with_capacity(w * h), Vec::with_capacity(w * h), Vec::with_capacity(w * h)];
    for y in 0..h {
        let row = &buf[y * frame.line_size..y * frame.line_size + 3 * w];
        for px in row.chunks_exact(3) {
            for c in 0..3 {
                planes[c].push(px[c] as f64 / 255.0);
            }
        }
    }
    Image::new(w, h, planes, Colorspace::Rgb)
}

/// Encode as 8-bit RGB; samples are rounded to the nearest `k / 255`.
pub fn encode_png(image: &Image) -> Result<Vec<u8>> {
    if image.colorspace() != Colorspace::Rgb {
        return Err(DataError::Contract("only RGB images can be encoded".into()));
    }
    let (w, h) = (image.width(), image.height());
    let mut raw = Vec::with_capacity(3 * w * h);
    for i in 0..w * h {
        for c in 0..3 {
            raw.push(to_u8(image.plane(c)[i]));
        }
    }
    let mut out = Vec::new();
    let mut encoder = png::Encoder::new(&mut out, w as u32, h as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| DataError::Contract(e.to_string()))?;
    writer.write_image_data(&raw).map_err(|e| DataError::Contract(e.to_string()))?;
    writer.finish().map_err(|e| DataError::Contract(e.to_string()))?;
    Ok(out)
}

pub fn read_png(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|e| DataError::io(path, e))?;
    decode_png(&bytes).map_err(|e| match e {
        DataError::Decode(d) => DataError::Decode(format!("{}: {d}", path.display())),
        DataError::Unsupported(d) => DataError::Unsupported(format!("{}: {d}", path.display())),
        other => other,
    })
}

pub fn write_png(path: &Path, image: &Image) -> Result<()> {
    fs::write(path, encode_png(image)?).map_err(|e| DataError::io(path, e))
}
