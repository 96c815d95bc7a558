//! Model parameters, temperature conversions, and the domain types shared by
//! every other module.
//!
//! The single effective parameter of all fixed-point equations is the
//! transfer weight θ = exp(J/T); couplings and temperatures are converted
//! once at the boundary and θ is carried everywhere else.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{PottsError, Result};
use crate::scalar::{cst, int, Real};
use crate::tol;

/// One instance of the q-state ferromagnetic Potts model on the Cayley tree
/// of order k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PottsParams<R> {
    q: usize,
    k: usize,
    coupling: R,
    theta: R,
}

impl<R: Real> PottsParams<R> {
    /// Builds parameters from a coupling `J > 0` and temperature `T > 0`.
    pub fn new(q: usize, k: usize, coupling: R, temperature: R) -> Result<Self> {
        let theta = theta_from_temperature(coupling, temperature)?;
        Self::with_theta_and_coupling(q, k, theta, coupling)
    }

    /// Builds parameters directly from θ, in the gauge J = 1.
    ///
    /// The coupling only matters for reported temperatures; every fixed-point
    /// computation depends on θ alone.
    pub fn with_theta(q: usize, k: usize, theta: R) -> Result<Self> {
        Self::with_theta_and_coupling(q, k, theta, R::one())
    }

    /// Builds parameters from θ with an explicit coupling for temperature
    /// reporting.
    pub fn with_theta_and_coupling(q: usize, k: usize, theta: R, coupling: R) -> Result<Self> {
        if q < 2 {
            return Err(PottsError::InvalidParameter(format!("q = {q}, need q >= 2")));
        }
        if k < 2 {
            return Err(PottsError::InvalidParameter(format!("k = {k}, need k >= 2")));
        }
        if !(coupling > R::zero()) || !coupling.is_finite() {
            return Err(PottsError::InvalidParameter(
                "coupling J must be positive and finite (ferromagnetic scope)".into(),
            ));
        }
        if !(theta > R::one()) || !theta.is_finite() {
            return Err(PottsError::InvalidParameter(format!(
                "theta = {theta} out of range; J > 0 and T > 0 force theta > 1"
            )));
        }
        Ok(Self { q, k, coupling, theta })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coupling(&self) -> R {
        self.coupling
    }

    pub fn theta(&self) -> R {
        self.theta
    }

    /// The classical non-uniqueness threshold θ_c = (k + q − 1)/(k − 1).
    pub fn theta_critical(&self) -> R {
        theta_critical(self.q, self.k).expect("validated at construction")
    }

    /// The temperature at which θ crosses θ_c.
    pub fn t_cr(&self) -> R {
        t_cr(self.coupling, self.q, self.k).expect("validated at construction")
    }

    /// Replaces θ, keeping q, k, and the coupling.
    pub fn at_theta(&self, theta: R) -> Result<Self> {
        Self::with_theta_and_coupling(self.q, self.k, theta, self.coupling)
    }
}

/// Transfer weight θ = exp(J/T).
///
/// Accepts any finite `J` (including 0, which yields θ = 1) even though the
/// model types downstream require J > 0.
pub fn theta_from_temperature<R: Real>(coupling: R, temperature: R) -> Result<R> {
    if !(temperature > R::zero()) || !temperature.is_finite() {
        return Err(PottsError::InvalidParameter(format!(
            "temperature T = {temperature} must be positive"
        )));
    }
    if !coupling.is_finite() {
        return Err(PottsError::InvalidParameter("coupling J must be finite".into()));
    }
    Ok((coupling / temperature).exp())
}

/// θ_c = (k + q − 1)/(k − 1), the classical critical transfer weight.
pub fn theta_critical<R: Real>(q: usize, k: usize) -> Result<R> {
    if q < 2 {
        return Err(PottsError::InvalidParameter(format!("q = {q}, need q >= 2")));
    }
    if k < 2 {
        return Err(PottsError::InvalidParameter(format!("k = {k}, need k >= 2")));
    }
    Ok(int::<R>(k + q - 1) / int::<R>(k - 1))
}

/// θ_c as an exact rational, for boundary comparisons against exactly-parsed
/// decimal input.
pub fn theta_critical_exact(q: usize, k: usize) -> Result<BigRational> {
    if q < 2 || k < 2 {
        return Err(PottsError::InvalidParameter(format!(
            "(q, k) = ({q}, {k}); need q >= 2 and k >= 2"
        )));
    }
    Ok(BigRational::new(BigInt::from(k + q - 1), BigInt::from(k - 1)))
}

/// T_cr = J / ln(1 + q/(k−1)), the temperature at which θ equals θ_c.
pub fn t_cr<R: Real>(coupling: R, q: usize, k: usize) -> Result<R> {
    if !(coupling > R::zero()) || !coupling.is_finite() {
        return Err(PottsError::InvalidParameter(format!(
            "coupling J = {coupling} must be positive"
        )));
    }
    let theta_c = theta_critical::<R>(q, k)?;
    Ok(coupling / theta_c.ln())
}

/// `true` when `theta` lies within relative tolerance of `reference`.
pub(crate) fn theta_close<R: Real>(theta: R, reference: R, rel_tol: f64) -> bool {
    (theta - reference).abs() <= cst::<R>(rel_tol) * reference.abs()
}

/// A positive (q−1)-vector z parameterizing a translation-invariant
/// splitting Gibbs measure; equivalently the field vector h = ln z.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLaw<R> {
    z: Vec<R>,
}

impl<R: Real> BoundaryLaw<R> {
    /// Builds a law from z-components, all of which must be positive and finite.
    pub fn from_z(z: Vec<R>) -> Result<Self> {
        if z.is_empty() {
            return Err(PottsError::InvalidParameter("boundary law must have q-1 >= 1 components".into()));
        }
        for (i, &zi) in z.iter().enumerate() {
            if !(zi > R::zero()) || !zi.is_finite() {
                return Err(PottsError::InvalidParameter(format!(
                    "boundary law component z[{i}] = {zi} must be positive and finite"
                )));
            }
        }
        Ok(Self { z })
    }

    /// Builds a law from field components h_i = ln z_i.
    pub fn from_h(h: Vec<R>) -> Result<Self> {
        if h.iter().any(|hi| !hi.is_finite()) {
            return Err(PottsError::InvalidParameter("boundary law fields must be finite".into()));
        }
        Self::from_z(h.into_iter().map(|hi| hi.exp()).collect())
    }

    /// The free law z = (1, …, 1) for a q-state model.
    pub fn free(q: usize) -> Self {
        Self { z: vec![R::one(); q - 1] }
    }

    pub fn z(&self) -> &[R] {
        &self.z
    }

    pub fn h(&self) -> Vec<R> {
        self.z.iter().map(|zi| zi.ln()).collect()
    }

    /// Number of components, q − 1.
    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

/// Canonical identity of one translation-invariant splitting Gibbs measure:
/// the subset M ⊆ {1, …, q} carrying the common value z*, all other
/// coordinates being 1.
///
/// The free measure is (∅, 1). Complementation (M, z*) ↦ (M^c, 1/z*) names
/// the same measure; the canonical representative has |M| ≤ q/2, with
/// z* > 1 required when q is even and |M| = q/2.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDescriptor<R> {
    members: Vec<usize>,
    zstar: R,
}

impl<R: Real> MeasureDescriptor<R> {
    /// Builds a descriptor from 1-based spin labels and a positive z*.
    ///
    /// Labels are sorted and deduplicated; validation against q happens in
    /// the operations that receive q.
    pub fn new(mut members: Vec<usize>, zstar: R) -> Result<Self> {
        if !(zstar > R::zero()) || !zstar.is_finite() {
            return Err(PottsError::InvalidParameter(format!(
                "zstar = {zstar} must be positive and finite"
            )));
        }
        if members.contains(&0) {
            return Err(PottsError::InvalidParameter("spin labels are 1-based".into()));
        }
        members.sort_unstable();
        members.dedup();
        if members.is_empty() && !(zstar == R::one()) {
            return Err(PottsError::InvalidParameter(
                "the empty-set descriptor is the free measure and requires zstar = 1".into(),
            ));
        }
        Ok(Self { members, zstar })
    }

    /// The free measure (∅, 1).
    pub fn free() -> Self {
        Self { members: Vec::new(), zstar: R::one() }
    }

    pub fn is_free(&self) -> bool {
        self.members.is_empty()
    }

    /// Sorted 1-based spin labels in M.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// |M|.
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn zstar(&self) -> R {
        self.zstar
    }

    pub fn contains(&self, spin: usize) -> bool {
        self.members.binary_search(&spin).is_ok()
    }

    /// Descriptor equality up to the z* comparison tolerance.
    pub fn approx_same(&self, other: &Self) -> bool {
        self.members == other.members && zstar_close(self.zstar, other.zstar)
    }
}

/// Equality predicate for z* values: relative 1e-9 with absolute floor 1e-12.
pub fn zstar_close<R: Real>(a: R, b: R) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= cst::<R>(tol::ZSTAR_EQ_ABS) + cst::<R>(tol::ZSTAR_EQ_REL) * scale
}
