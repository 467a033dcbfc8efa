//! Shared error type.
//!
//! Three failure classes map onto the CLI exit codes: usage and resource
//! errors (exit 2), and property violations (exit 1). A property violation
//! means a mathematical invariant that the library is supposed to certify
//! failed to hold; it is never expected and always carries a witness.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition or passed a malformed value.
    #[error("usage error: {0}")]
    Usage(String),

    /// An instance exceeds a hard resource cap (enumeration size, ground-set size).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A certified invariant failed. This signals a bug (or a disproof) and
    /// must halt loudly with the witness.
    #[error("property violation [{property}]: {witness}")]
    PropertyViolation { property: String, witness: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn violation(property: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::PropertyViolation {
            property: property.into(),
            witness: witness.into(),
        }
    }

    /// Process exit code for this error per the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PropertyViolation { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_cli_contract() {
        assert_eq!(Error::usage("x").exit_code(), 2);
        assert_eq!(Error::resource("x").exit_code(), 2);
        assert_eq!(Error::violation("p", "w").exit_code(), 1);
        let io = Error::from(std::io::Error::other("x"));
        assert_eq!(io.exit_code(), 2);
    }

    #[test]
    fn violation_message_carries_the_witness() {
        let e = Error::violation("tail_reflection", "k=4 m=2 n=6 l=2");
        let msg = e.to_string();
        assert!(msg.contains("tail_reflection"));
        assert!(msg.contains("k=4 m=2 n=6 l=2"));
    }
}
