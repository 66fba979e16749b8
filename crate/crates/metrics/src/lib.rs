//! Luminance PSNR/SSIM, geometric self-ensemble and dataset evaluation reports.

mod ensemble;
mod error;
mod eval;
mod quality;

pub use ensemble::self_ensemble;
pub use error::{MetricError, Result};
pub use eval::{evaluate_dataset, EvalReport, ImageRecord};
pub use quality::{psnr_y, ssim_y, ssim_window, SSIM_WINDOW};
