//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PottsError {
    /// A model parameter violates its domain (q < 2, non-positive coupling, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An exhaustive computation was requested beyond the configuration budget.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    /// A numerical invariant failed (bracket count, multiplicity bound, ordering).
    /// These signal solver defects and are never silently resolved.
    #[error("numerical anomaly: {0}")]
    NumericalAnomaly(String),

    /// Enumeration disagrees with the closed-form count; a root-finder defect.
    #[error("enumeration produced {found} measures but the counting law gives {expected}")]
    CountMismatch { found: usize, expected: u64 },
}

pub type Result<T> = core::result::Result<T, PottsError>;
