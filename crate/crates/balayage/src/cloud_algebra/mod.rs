//! Clouds: weighted sums of markers (finite site sequences), their
//! convolution algebra, the order `⊴`, class membership and the
//! coefficientwise identities between cleaning clouds.

mod classify;
mod cloud;
mod identities;
mod marker;
mod order;
mod realize;
mod trace;

pub use classify::{classify, CloudClassReport, PairWitness};
pub use cloud::{Cloud, CloudKind, CloudLiteral, MarkerWeight, MARKER_NODE_CAP};
pub use identities::{
    verify_cloud_identity, CloudIdentity, CloudIdentityReport, CLOUD_IDENTITY_NAMES, LIMIT_MAX_TERMS,
};
pub use marker::Marker;
pub use order::{order_leq, OrderResult};
pub use realize::{marker_weight, realize, realize_left};
pub use trace::{binomial, cloud_product_trace, CloudTrace, CloudTraceStep};
