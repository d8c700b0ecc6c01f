//! The cleaning-operator and balayage calculus for nonnegative kernels.

pub mod cleaning_ops;
pub mod cloud_algebra;
pub mod dense;
pub mod digest;
pub mod error;
pub mod examples_gallery;
pub mod io;
pub mod kernel_core;
pub mod random;
pub mod scalar;
pub mod sweep_engine;

pub use cleaning_ops::*;
pub use cloud_algebra::*;
pub use error::{Error, Result};
pub use io::{Instance, InstanceDoc};
pub use kernel_core::*;
pub use scalar::{Dyadic, Scalar};
pub use sweep_engine::*;
