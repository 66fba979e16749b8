//! Images, degradation synthesis and patch sampling for super-resolution training.

pub mod color;
pub mod dataset;
pub mod degrade;
pub mod dihedral;
pub mod error;
pub mod filter;
pub mod image;
pub mod patches;
pub mod png_io;

pub use color::{rgb_to_ycbcr, y_channel};
pub use dataset::{list_pngs, Dataset};
pub use degrade::{degrade, upscale_bicubic, DegradationKind, DegradationSpec, SUPPORTED_SCALES};
pub use dihedral::Dihedral;
pub use error::{DataError, Result};
pub use filter::{bicubic_resize, gaussian_blur, gaussian_kernel};
pub use image::{batch_tensor, Colorspace, Image};
pub use patches::{augment, sample_patches, PatchPair, PatchSampler};
pub use png_io::{decode_png, encode_png, read_png, write_png};
