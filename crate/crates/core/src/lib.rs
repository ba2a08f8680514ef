//! Simulation, calibration and benchmarking of cross-resonance gates between
//! two fixed-frequency transmons.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarking;
pub mod calibration;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod tomography;

pub use device::DeviceConfig;
pub use error::{Error, Result};
