use thiserror::Error;

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands belong to different rings, e.g. cyclotomic rings of different
    /// level or residues of different precision.
    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    /// An exact division had a nonzero remainder.
    #[error("not divisible: {0}")]
    NotDivisible(String),

    /// A symbolic computation outgrew the configured monomial cap.
    #[error("resource limit: {terms} monomials exceeds cap of {cap}")]
    ResourceLimit { terms: usize, cap: usize },

    /// A computation that must succeed by construction did not. Always a bug
    /// or a corrupted configuration.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// An identity check found a nonzero difference.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl AlgebraError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        AlgebraError::Domain(msg.into())
    }
}
