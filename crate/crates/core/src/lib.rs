//! Translation-invariant splitting Gibbs measures of the ferromagnetic
//! q-state Potts model on a Cayley tree of order k.
//!
//! The crate finds **all** translation-invariant splitting Gibbs measures
//! (TISGMs) of the model, the critical transfer weights at which their number
//! changes, and verifies every claim independently with exact finite-volume
//! computations:
//!
//! * [`model`] — parameters, θ = exp(J/T) conversions, boundary laws, and
//!   canonical measure descriptors.
//! * [`recursion`] — the tree recursion for boundary fields, its scalar
//!   reduction, and complete positive-root isolation for the fixed-point
//!   polynomial.
//! * [`critical`] — tangency roots x_*(m), critical transfer weights θ_m and
//!   temperatures T_{c,m}, and their ordering.
//! * [`enumerate`] — the canonical list of measures and the exact counts in
//!   every temperature regime.
//! * [`oracle`] — brute-force verification: exhaustive finite-volume Gibbs
//!   distributions, compatibility and complement checks, a seeded multi-start
//!   solver for the full fixed-point system, and a convex-hull extremality
//!   certificate.
//!
//! The numeric core is generic over the scalar type through [`scalar::Real`];
//! the aliases below pin the common `f64` instantiations.

// Validation deliberately writes `!(x > 0)` so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod critical;
pub mod enumerate;
pub mod error;
pub mod model;
pub mod oracle;
pub mod recursion;
pub(crate) mod rootfind;
pub mod scalar;
pub mod tol;

pub use error::{PottsError, Result};
pub use model::{BoundaryLaw, MeasureDescriptor, PottsParams};
pub use recursion::{Root, RootSet};

/// `f64` model parameters.
pub type Params64 = PottsParams<f64>;
/// `f64` boundary law.
pub type BoundaryLaw64 = BoundaryLaw<f64>;
/// `f64` measure descriptor.
pub type Descriptor64 = MeasureDescriptor<f64>;
/// `f64` root set.
pub type RootSet64 = RootSet<f64>;
/// `f64` critical point.
pub type CriticalPoint64 = critical::CriticalPoint<f64>;
