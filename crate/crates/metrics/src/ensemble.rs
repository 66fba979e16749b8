use han_data::{Dihedral, Image};

use crate::error::MetricError;

/// Run `forward` on all 8 dihedral transforms of `lr`, undo each transform on the
/// output and average.
///
/// Outputs are combined as `((o0 + o1) + (o2 + o3)) + ((o4 + o5) + (o6 + o7))`, then
/// divided by 8; every step is exact when all eight agree, so constant outputs survive
/// unchanged.
pub fn self_ensemble<F, E>(mut forward: F, lr: &Image) -> Result<Image, E>
where
    F: FnMut(&Image) -> Result<Image, E>,
    E: From<MetricError>,
{
    let mut outs = Vec::with_capacity(8);
    for d in Dihedral::ALL {
        let out = d.inverse().apply(&forward(&d.apply(lr))?);
        if let Some(first) = outs.first().map(|o: &Image| (o.width(), o.height())) {
            if (out.width(), out.height()) != first {
                return Err(MetricError::Contract(format!(
                    "transform {} produced {}x{}, expected {}x{}",
                    d.index(),
                    out.width(),
                    out.height(),
                    first.0,
                    first.1
                ))
                .into());
            }
        }
        outs.push(out);
    }
    let planes: [Vec<f64>; 3] = std::array::from_fn(|c| {
        (0..outs[0].plane(c).len())
            .map(|i| {
                let v = |k: usize| outs[k].plane(c)[i];
                (((v(0) + v(1)) + (v(2) + v(3))) + ((v(4) + v(5)) + (v(6) + v(7)))) / 8.0
            })
            .collect()
    });
    Ok(Image::new(outs[0].width(), outs[0].height(), planes, lr.colorspace()).map_err(MetricError::from)?)
}
