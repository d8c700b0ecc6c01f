//! Command failures and their exit codes.

use std::fmt;

use balayage::Error;

/// Exit code for success.
pub const EXIT_OK: u8 = 0;
/// Exit code for broken inputs or preconditions.
pub const EXIT_CONTRACT: u8 = 2;
/// Exit code for a procedure that did not converge within its budget.
pub const EXIT_NON_CONVERGENCE: u8 = 3;

/// A failed command: a message for stderr and an exit code.
#[derive(Debug)]
pub struct Failure {
    /// Plain-text explanation.
    pub message: String,
    /// Process exit code.
    pub code: u8,
}

impl Failure {
    /// A contract failure (exit code 2).
    pub fn contract(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_CONTRACT }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_non_convergence() { EXIT_NON_CONVERGENCE } else { EXIT_CONTRACT };
        Self { message: e.to_string(), code }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
