//! Cleaning operators `β_f`, `β*_f`, the balayage `Π_Λ` with certified
//! truncation error, and verifiers for the operator identities and
//! inequalities.

mod balayage;
mod operator;
mod verify;

pub use balayage::{balayage, BalayageResult, TailCertificate};
pub(crate) use operator::left_apply_beta;
pub use operator::{apply_cleaning, apply_cleaning_signed, CleaningOperator};
pub use verify::{
    verify_identity, verify_inequality, IdentityCheck, IdentityReport, InequalityCheck,
    InequalityReport, IDENTITY_NAMES, INEQUALITY_NAMES, VERIFY_REL_TOL,
};
