use std::fmt::Write as _;
use std::path::Path;

use han_data::{Dataset, DegradationKind, DegradationSpec, Image};

use crate::error::{MetricError, Result};
use crate::quality::{psnr_y, ssim_y};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub name: String,
    /// `f64::INFINITY` for a perfect reconstruction.
    pub psnr: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub scale: usize,
    pub degradation: DegradationKind,
    pub crop: usize,
    pub records: Vec<ImageRecord>,
    /// Mean over finite PSNR values; infinite when every image is a perfect match.
    pub mean_psnr: f64,
    pub mean_ssim: f64,
    /// Perfect reconstructions left out of `mean_psnr`.
    pub sentinel_count: usize,
}

impl EvalReport {
    pub fn from_records(spec: &DegradationSpec, crop: usize, records: Vec<ImageRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(MetricError::Contract("report needs at least one image".into()));
        }
        let finite: Vec<f64> = records.iter().map(|r| r.psnr).filter(|p| p.is_finite()).collect();
        let mean_psnr = if finite.is_empty() { f64::INFINITY } else { finite.iter().sum::<f64>() / finite.len() as f64 };
        let mean_ssim = records.iter().map(|r| r.ssim).sum::<f64>() / records.len() as f64;
        Ok(EvalReport {
            scale: spec.scale,
            degradation: spec.kind,
            crop,
            sentinel_count: records.len() - finite.len(),
            records,
            mean_psnr,
            mean_ssim,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# x{} {} crop={} images={}",
            self.scale,
            self.degradation,
            self.crop,
            self.records.len()
        );
        let width = self.records.iter().map(|r| r.name.len()).max().unwrap_or(0).max(4);
        for r in &self.records {
            let _ = writeln!(s, "{:<width$}  psnr {:>8} dB  ssim {:.4}", r.name, fmt_psnr(r.psnr), r.ssim);
        }
        let _ = writeln!(s, "{:<width$}  psnr {:>8} dB  ssim {:.4}", "mean", fmt_psnr(self.mean_psnr), self.mean_ssim);
        if self.sentinel_count > 0 {
            let _ = writeln!(s, "warning: {} perfect reconstruction(s) excluded from mean psnr", self.sentinel_count);
        }
        s
    }

    /// Tab-separated table: header, then one `filename psnr ssim` row per image.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("filename\tpsnr\tssim\n");
        for r in &self.records {
            let _ = writeln!(s, "{}\t{}\t{:.6}", r.name, fmt_psnr_exact(r.psnr), r.ssim);
        }
        s
    }
}

fn fmt_psnr(p: f64) -> String {
    if p.is_infinite() { "inf".into() } else { format!("{p:.4}") }
}

fn fmt_psnr_exact(p: f64) -> String {
    if p.is_infinite() { "inf".into() } else { format!("{p:.6}") }
}

/// Score `model` on every image of the dataset at `dir` in file-name order.
/// `crop` defaults to the scale.
pub fn evaluate_dataset<F, E>(model: F, dir: &Path, spec: &DegradationSpec, crop: Option<usize>) -> Result<EvalReport>
where
    F: Fn(&Image) -> std::result::Result<Image, E>,
    E: std::fmt::Display,
{
    spec.validate()?;
    let dataset = Dataset::load(dir)?;
    if dataset.is_empty() {
        return Err(MetricError::EmptyDataset(Dataset::hr_dir(dir)));
    }
    let crop = crop.unwrap_or(spec.scale);
    let mut records = Vec::with_capacity(dataset.len());
    for (name, (lr, hr)) in dataset.names().iter().zip(dataset.pairs(spec, false)?) {
        let sr = model(&lr).map_err(|e| MetricError::Model { name: name.clone(), detail: e.to_string() })?;
        if (sr.width(), sr.height()) != (hr.width(), hr.height()) {
            return Err(MetricError::Model {
                name: name.clone(),
                detail: format!("output {}x{} but HR is {}x{}", sr.width(), sr.height(), hr.width(), hr.height()),
            });
        }
        records.push(ImageRecord { name: name.clone(), psnr: psnr_y(&sr, &hr, crop)?, ssim: ssim_y(&sr, &hr, crop)? });
    }
    EvalReport::from_records(spec, crop, records)
}
