//! Forward implementations (as `Graph` methods) and their backward rules.

pub(crate) mod activation;
pub(crate) mod conv;
pub(crate) mod elementwise;
pub(crate) mod linalg;
pub(crate) mod loss;
pub(crate) mod reduce;
pub(crate) mod shape;

pub use shape::{permute_tensor, pixel_shuffle_tensor, pixel_unshuffle_tensor};
