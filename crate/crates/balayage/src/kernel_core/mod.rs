//! Site spaces, sparse nonnegative kernels, dirt and weight vectors,
//! weighted norms, class structure, spectral radii and the decision
//! procedure for positive subinvariant vectors.

mod converse;
mod fh;
mod kernel;
mod norms;
mod space;
mod spectral;
mod vectors;

pub use converse::{
    converse_battery, partial_series, ConditionResult, ConverseOptions, ConverseReport, Quantity,
    CONVERSE_CONDITIONS, CONVERSE_SPR_MARGIN,
};
pub use fh::{check_fh, FhReport, FhViolation, UNIT_RADIUS_TOL, WITNESS_TOL};
pub use kernel::{Kernel, KernelView};
pub use norms::{
    is_subinvariant, sup_ratio, weighted_operator_norm, weighted_vector_norm, wnorm, WeightedRows,
};
pub use space::{SiteSet, SiteSpace};
pub use spectral::{
    class_decomposition, class_decomposition_with, spectral_radius, ClassDecomposition,
    DEFAULT_SPR_MAX_ITER, DEFAULT_SPR_TOL,
};
pub use vectors::{DirtVector, Profile, SignedVector, WeightVector};
