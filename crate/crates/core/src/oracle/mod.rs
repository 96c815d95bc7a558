//! Independent brute-force verification.
//!
//! Nothing in this module trusts the scalar reduction or the enumeration
//! path: finite-volume probabilities come from exhaustive summation over all
//! configurations of an explicit tree volume, and the full (q−1)-dimensional
//! fixed-point system is solved from scratch by a seeded multi-start search.
//! Exhaustive summation is the ground truth; there is no Monte Carlo in the
//! verification path.

mod exhaustive;
mod hull;
mod report;
mod solver;
mod tree;

pub use exhaustive::{
    check_compatibility, cylinder_distribution, energy, finite_volume_probability,
    partition_function, root_marginal, verify_complement_identity,
};
pub use hull::{hull_extremality_check, HullVerdict};
pub use report::{run_verification, sig12, CheckResult, VerificationReport, VerifyConfig};
pub use solver::{multi_start_solver, MultiStartOutcome};
pub use tree::{build_tree, FiniteConfiguration, FiniteTree};

use crate::scalar::Real;

/// Compensated accumulator, so reduction order changes results by no more
/// than O(ε) regardless of how sums are chunked.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KahanSum<R> {
    sum: R,
    carry: R,
}

impl<R: Real> KahanSum<R> {
    pub(crate) fn new() -> Self {
        Self { sum: R::zero(), carry: R::zero() }
    }

    pub(crate) fn add(&mut self, value: R) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> R {
        self.sum
    }
}
