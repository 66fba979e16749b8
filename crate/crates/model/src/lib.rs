//! The HAN super-resolution network on top of `han-core`.
//!
//! `F_0 = head(I_LR)`, `F_i = RG_i(F_{i-1})`, `F_L = LAM(F_1..F_N)`,
//! `F_CS = CSAM(F_N)`, `I_SR = tail(upsample(F_0 + F_L + F_CS))`.

pub mod attention;
pub mod config;
pub mod error;
pub mod layers;
pub mod network;
pub mod training;

pub use config::{ModelConfig, Variant};
pub use error::{ModelError, Result};
pub use network::{Bypass, ForwardTrace, Han};
pub use training::Trainer;
