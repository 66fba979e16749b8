//! Tensor engine for the HAN super-resolution network.
//!
//! Dense row-major tensors, a define-by-run reverse-mode autodiff [`Graph`],
//! im2col convolution kernels and an Adam optimizer. Everything is generic over
//! [`Real`]: training uses `f32`, gradient checks use `f64`.

pub mod adam;
pub mod error;
pub mod exec;
pub mod gradcheck;
pub mod graph;
pub mod kernels;
pub mod ops;
pub mod params;
pub mod reference;
pub mod scalar;
pub mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use error::{Result, TensorError};
pub use graph::{Graph, Var};
pub use params::ParamSet;
pub use scalar::{DType, Real};
pub use tensor::Tensor;
