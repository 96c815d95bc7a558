//! The canonical list of translation-invariant splitting Gibbs measures and
//! the exact counts in every temperature regime.
//!
//! Each measure is identified by a descriptor (M, z*): a spin subset
//! M ⊆ {1, …, q} carrying the common value z*, with (M, z*) and (M^c, 1/z*)
//! naming the same measure. The free measure (∅, 1) exists at all
//! temperatures; the others come from the positive roots of φ_{|M|}.

use itertools::Itertools;
use num_integer::binomial;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::critical;
use crate::error::{PottsError, Result};
use crate::model::{
    theta_close, theta_critical_exact, BoundaryLaw, MeasureDescriptor, PottsParams,
};
use crate::recursion::{solve_phi_with, vector_residual};
use crate::scalar::{cst, int, Real};
use crate::tol::{self, Tolerances};

/// Where θ falls relative to the critical weights θ_1 < … < θ_{⌊q/2⌋} ≤ θ_c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// θ < θ_1: the free measure is the only TISGM.
    Unique,
    /// θ_m < θ < θ_{m+1}.
    Between(usize),
    /// θ > θ_{⌊q/2⌋} and θ ≠ θ_c: all 2^q − 1 measures are present.
    AllOpen,
    /// θ = θ_c.
    AtThetaC,
    /// θ = θ_m ≠ θ_c.
    AtThetaM(usize),
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Regime::Unique => write!(f, "unique"),
            Regime::Between(m) => write!(f, "between({m})"),
            Regime::AllOpen => write!(f, "all_open"),
            Regime::AtThetaC => write!(f, "at_thetac"),
            Regime::AtThetaM(m) => write!(f, "at_thetam({m})"),
        }
    }
}

/// A regime together with the exact number of TISGMs in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub count: u64,
}

/// Exact measure count for a regime at the given q.
fn count_for(regime: Regime, q: usize) -> u64 {
    let q64 = q as u64;
    let twice_tail = |m: u64| 2 * (1..=m).map(|s| binomial(q64, s)).sum::<u64>();
    match regime {
        Regime::Unique => 1,
        Regime::Between(m) => 1 + twice_tail(m as u64),
        Regime::AllOpen => (1u64 << q) - 1,
        Regime::AtThetaC => {
            if q % 2 == 1 {
                1 << (q - 1)
            } else {
                (1 << (q - 1)) - binomial(q64 - 1, q64 / 2)
            }
        }
        Regime::AtThetaM(m) => 1 + binomial(q64, m as u64) + twice_tail(m as u64 - 1),
    }
}

fn classify<R: Real>(
    params: &PottsParams<R>,
    exact_theta: Option<&BigRational>,
    tols: &Tolerances,
) -> Result<Regime> {
    let q = params.q();
    let theta = params.theta();
    let theta_c = params.theta_critical();

    // A decimal θ compares to the rational θ_c exactly; otherwise the
    // relative tolerance decides the boundary.
    let at_c = match exact_theta {
        Some(rational) => *rational == theta_critical_exact(q, params.k())?,
        None => theta_close(theta, theta_c, tols.boundary_rel),
    };
    if at_c {
        return Ok(Regime::AtThetaC);
    }

    let half = q / 2;
    let mut thetas = Vec::with_capacity(half);
    for m in 1..=half {
        thetas.push(critical::theta_m(m, params)?);
    }
    for (idx, &tm) in thetas.iter().enumerate() {
        let m = idx + 1;
        // For even q the top critical weight *is* θ_c; that boundary was
        // already decided above.
        if q.is_multiple_of(2) && m == half {
            continue;
        }
        if theta_close(theta, tm, tols.boundary_rel) {
            return Ok(Regime::AtThetaM(m));
        }
    }
    if theta < thetas[0] {
        return Ok(Regime::Unique);
    }
    if theta > thetas[half - 1] {
        return Ok(Regime::AllOpen);
    }
    for m in (1..half).rev() {
        if theta > thetas[m - 1] {
            return Ok(Regime::Between(m));
        }
    }
    // Unreachable: θ was strictly between θ_1 and θ_{⌊q/2⌋} yet in no slot.
    Err(PottsError::NumericalAnomaly(format!(
        "theta = {theta} could not be placed among the critical weights {thetas:?}"
    )))
}

/// Classifies θ and returns the exact TISGM count for the regime.
pub fn count_tisgm<R: Real>(params: &PottsParams<R>) -> Result<RegimeClassification> {
    count_tisgm_with(params, None, &Tolerances::default())
}

/// [`count_tisgm`] with an exactly-parsed θ (when available) and explicit
/// tolerances.
pub fn count_tisgm_with<R: Real>(
    params: &PottsParams<R>,
    exact_theta: Option<&BigRational>,
    tols: &Tolerances,
) -> Result<RegimeClassification> {
    let regime = classify(params, exact_theta, tols)?;
    Ok(RegimeClassification { regime, count: count_for(regime, params.q()) })
}

/// Complement representation of the same measure: (M, z*) ↦ (M^c, 1/z*).
///
/// Applying it twice is the identity.
pub fn complement_descriptor<R: Real>(
    d: &MeasureDescriptor<R>,
    q: usize,
) -> Result<MeasureDescriptor<R>> {
    check_members(d, q)?;
    let members_c: Vec<usize> = (1..=q).filter(|s| !d.contains(*s)).collect();
    let zstar_c = R::one() / d.zstar();
    if members_c.is_empty() {
        // Complement of the full set; only the free value survives.
        return MeasureDescriptor::new(members_c, zstar_c);
    }
    MeasureDescriptor::new(members_c, zstar_c)
}

/// Canonical representative of a descriptor: |M| ≤ q/2, and z* > 1 when q is
/// even and |M| = q/2; any descriptor with z* ≈ 1 collapses to the free
/// measure. Idempotent, and stable under complement.
pub fn canonicalize<R: Real>(d: MeasureDescriptor<R>, q: usize) -> Result<MeasureDescriptor<R>> {
    check_members(&d, q)?;
    let one = R::one();
    if (d.zstar() - one).abs() <= cst::<R>(tol::ZSTAR_EQ_REL) {
        return Ok(MeasureDescriptor::free());
    }
    let m = d.size();
    if 2 * m > q || (2 * m == q && d.zstar() < one) {
        return complement_descriptor(&d, q);
    }
    Ok(d)
}

/// Expands a descriptor into its (q−1)-component boundary law: z_i = z* on
/// M ∩ {1, …, q−1} and 1 elsewhere, after rewriting through the complement
/// whenever q ∈ M.
pub fn boundary_law_vector<R: Real>(
    d: &MeasureDescriptor<R>,
    q: usize,
) -> Result<BoundaryLaw<R>> {
    check_members(d, q)?;
    let rewritten;
    let d = if d.contains(q) {
        rewritten = complement_descriptor(d, q)?;
        &rewritten
    } else {
        d
    };
    let mut z = vec![R::one(); q - 1];
    for &s in d.members() {
        z[s - 1] = d.zstar();
    }
    BoundaryLaw::from_z(z)
}

fn check_members<R: Real>(d: &MeasureDescriptor<R>, q: usize) -> Result<()> {
    if let Some(&max) = d.members().last() {
        if max > q {
            return Err(PottsError::InvalidParameter(format!(
                "descriptor contains spin {max} > q = {q}"
            )));
        }
    }
    Ok(())
}

/// z* = x^k, evaluated through the log for x away from 1.
fn z_from_root<R: Real>(x: R, k: usize) -> R {
    if (x - R::one()).abs() < cst::<R>(0.5) {
        x.powi(k as i32)
    } else {
        (int::<R>(k) * x.ln()).exp()
    }
}

/// The complete canonical list of TISGMs at the given parameters.
///
/// The free measure, then for each m ≤ ⌊q/2⌋, each root of φ_m, and each
/// subset of size m, deduplicated by complement symmetry. The list length is
/// checked against [`count_tisgm`]; a mismatch is a root-finder defect and is
/// returned as a hard error. Every returned descriptor's boundary law has
/// fixed-point residual ≤ 1e-9.
pub fn enumerate_tisgm<R: Real>(params: &PottsParams<R>) -> Result<Vec<MeasureDescriptor<R>>> {
    enumerate_tisgm_with(params, None, &Tolerances::default())
}

/// [`enumerate_tisgm`] with an exactly-parsed θ and explicit tolerances.
pub fn enumerate_tisgm_with<R: Real>(
    params: &PottsParams<R>,
    exact_theta: Option<&BigRational>,
    tols: &Tolerances,
) -> Result<Vec<MeasureDescriptor<R>>> {
    let q = params.q();
    let classification = count_tisgm_with(params, exact_theta, tols)?;
    let at_c = classification.regime == Regime::AtThetaC;

    let mut measures = vec![MeasureDescriptor::free()];
    for m in 1..=q / 2 {
        let roots = solve_phi_with(m, params, tols)?;
        for root in roots.iter() {
            // Roots at the trivial point reproduce the free measure; they
            // occur exactly at θ_c and are discarded there.
            if (root.x - R::one()).abs() <= cst::<R>(tol::TRIVIAL_ROOT_TOL) {
                if !at_c {
                    return Err(PottsError::NumericalAnomaly(format!(
                        "trivial root x = {} appeared away from theta_c (m = {m})",
                        root.x
                    )));
                }
                continue;
            }
            let zstar = z_from_root(root.x, params.k());
            // Self-complementary block size: the two reciprocal roots name
            // complement-equivalent measures, so keep the z* > 1 branch.
            if 2 * m == q && zstar < R::one() {
                continue;
            }
            for subset in (1..=q).combinations(m) {
                measures.push(MeasureDescriptor::new(subset, zstar)?);
            }
        }
    }

    if measures.len() as u64 != classification.count {
        return Err(PottsError::CountMismatch {
            found: measures.len(),
            expected: classification.count,
        });
    }
    for d in &measures {
        let law = boundary_law_vector(d, q)?;
        let residual = vector_residual(&law, params)?;
        if residual > cst(tol::FIXED_POINT_RESIDUAL) {
            return Err(PottsError::NumericalAnomaly(format!(
                "enumerated descriptor (M = {:?}, z* = {}) has residual {residual}",
                d.members(),
                d.zstar()
            )));
        }
    }
    Ok(measures)
}

/// Serialized form of one measure, as consumed by the CLI and the
/// verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescriptorRecord {
    /// Sorted 1-based spin labels of M.
    #[serde(rename = "M")]
    pub set: Vec<usize>,
    /// Common z-value on M.
    pub zstar: f64,
    /// |M|.
    pub m: usize,
    /// Regime string of the run that produced the record.
    pub regime: String,
}

/// Renders descriptors into serializable records.
pub fn descriptor_records<R: Real>(
    measures: &[MeasureDescriptor<R>],
    regime: Regime,
) -> Vec<DescriptorRecord> {
    measures
        .iter()
        .map(|d| DescriptorRecord {
            set: d.members().to_vec(),
            zstar: d.zstar().to_f64().expect("descriptor value fits f64"),
            m: d.size(),
            regime: regime.to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(q: usize, k: usize, theta: f64) -> PottsParams<f64> {
        PottsParams::with_theta(q, k, theta).unwrap()
    }

    #[test]
    fn counts_at_named_points() {
        let cases = [
            (3, 2, 3.0, Regime::Unique, 1),
            (3, 2, 5.0, Regime::AllOpen, 7),
            (3, 2, 4.0, Regime::AtThetaC, 4),
            (4, 2, 4.9, Regime::Between(1), 9),
            (4, 2, 5.0, Regime::AtThetaC, 5),
            (5, 2, 5.0, Regime::AtThetaM(1), 6),
            (3, 2, 3.9, Regime::AllOpen, 7),
            (3, 2, 1.0 + 2.0 * 2.0f64.sqrt(), Regime::AtThetaM(1), 4),
            (5, 2, 1.0 + 2.0 * 6.0f64.sqrt(), Regime::AtThetaM(2), 21),
            (5, 2, 6.0, Regime::AtThetaC, 16),
            (5, 2, 6.5, Regime::AllOpen, 31),
            (2, 2, 2.5, Regime::Unique, 1),
            (2, 2, 3.0, Regime::AtThetaC, 1),
            (2, 2, 4.0, Regime::AllOpen, 3),
        ];
        for (q, k, theta, regime, count) in cases {
            let c = count_tisgm(&params(q, k, theta)).unwrap();
            assert_eq!(c.regime, regime, "q={q} k={k} theta={theta}");
            assert_eq!(c.count, count, "q={q} k={k} theta={theta}");
        }
    }

    #[test]
    fn exact_rational_overrides_float_boundary() {
        use num_bigint::BigInt;
        // A θ one part in 10^15 away from θ_c = 4 still passes the float
        // tolerance, but an exact decimal decides the boundary.
        let theta = 3.999_999_999_999_999_6f64;
        let p = params(3, 2, theta);
        let tols = Tolerances { boundary_rel: 1e-12, ..Default::default() };
        assert_eq!(count_tisgm(&p).unwrap().regime, Regime::AtThetaC);
        let exact = BigRational::new(BigInt::from(39_999_999i64), BigInt::from(10_000_000i64));
        let c = count_tisgm_with(&p, Some(&exact), &tols).unwrap();
        assert_ne!(c.regime, Regime::AtThetaC);
        let exactly_four = BigRational::from(BigInt::from(4));
        let c = count_tisgm_with(&params(3, 2, 4.0), Some(&exactly_four), &tols).unwrap();
        assert_eq!(c.regime, Regime::AtThetaC);
    }

    #[test]
    fn enumerate_seven_measures_at_q3_theta5() {
        let p = params(3, 2, 5.0);
        let measures = enumerate_tisgm(&p).unwrap();
        assert_eq!(measures.len(), 7);
        let z_plus = (2.0 + 2.0f64.sqrt()).powi(2);
        let z_minus = (2.0 - 2.0f64.sqrt()).powi(2);
        assert!(measures[0].is_free());
        let mut found = 0;
        for zval in [z_minus, z_plus] {
            for spin in 1..=3usize {
                assert!(
                    measures.iter().any(|d| d.members() == [spin]
                        && (d.zstar() - zval).abs() <= 1e-9 * zval),
                    "missing ({{{spin}}}, {zval})"
                );
                found += 1;
            }
        }
        assert_eq!(found, 6);
    }

    #[test]
    fn enumerate_free_only_below_first_critical_weight() {
        let measures = enumerate_tisgm(&params(3, 2, 3.0)).unwrap();
        assert_eq!(measures.len(), 1);
        assert!(measures[0].is_free());
    }

    #[test]
    fn enumerate_fifteen_measures_at_q4_theta6() {
        let measures = enumerate_tisgm(&params(4, 2, 6.0)).unwrap();
        assert_eq!(measures.len(), 15);
        // The m = 2 block keeps only the z* > 1 branch of the reciprocal pair.
        let half: Vec<_> = measures.iter().filter(|d| d.size() == 2).collect();
        assert_eq!(half.len(), 6);
        for d in half {
            assert_relative_eq!(d.zstar(), 4.0, max_relative = 1e-10);
        }
        assert_eq!(measures.iter().filter(|d| d.size() == 1).count(), 8);
    }

    #[test]
    fn enumeration_length_matches_count_across_grid() {
        for q in 2..=6usize {
            for k in 2..=3usize {
                let base = params(q, k, 2.0);
                let mut probes: Vec<f64> = Vec::new();
                let pts = critical::critical_temperatures(&base).unwrap();
                let theta_c = base.theta_critical();
                probes.push(pts[0].theta_m * 0.97);
                for w in pts.windows(2) {
                    probes.push(0.5 * (w[0].theta_m + w[1].theta_m));
                    probes.push(w[0].theta_m);
                }
                probes.push(pts.last().unwrap().theta_m);
                probes.push(theta_c);
                probes.push(theta_c * 1.04 + 0.01);
                probes.push(theta_c * 1.5);
                for theta in probes {
                    if theta <= 1.0 {
                        continue;
                    }
                    let p = params(q, k, theta);
                    let count = count_tisgm(&p).unwrap().count;
                    let measures = enumerate_tisgm(&p).unwrap();
                    assert_eq!(
                        measures.len() as u64,
                        count,
                        "q={q} k={k} theta={theta}"
                    );
                    // Pairwise distinctness of canonical descriptors.
                    for (i, a) in measures.iter().enumerate() {
                        for b in &measures[i + 1..] {
                            assert!(!a.approx_same(b), "duplicate descriptor at theta={theta}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn complement_examples() {
        let d = MeasureDescriptor::new(vec![1], 8.0f64).unwrap();
        let c = complement_descriptor(&d, 3).unwrap();
        assert_eq!(c.members(), &[2, 3]);
        assert_relative_eq!(c.zstar(), 0.125, max_relative = 1e-15);

        let free = MeasureDescriptor::<f64>::free();
        let c = complement_descriptor(&free, 3).unwrap();
        assert_eq!(c.members(), &[1, 2, 3]);
        assert_eq!(c.zstar(), 1.0);
        assert!(canonicalize(c, 3).unwrap().is_free());

        let d = MeasureDescriptor::new(vec![1, 2], 4.0f64).unwrap();
        let c = complement_descriptor(&d, 4).unwrap();
        assert_eq!(c.members(), &[3, 4]);
        assert_relative_eq!(c.zstar(), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn complement_is_an_involution() {
        for (members, zstar, q) in [
            (vec![1usize], 11.65685424949238f64, 3usize),
            (vec![2, 3], 0.2, 4),
            (vec![1, 4], 7.5, 5),
        ] {
            let d = MeasureDescriptor::new(members, zstar).unwrap();
            let back = complement_descriptor(&complement_descriptor(&d, q).unwrap(), q).unwrap();
            assert_eq!(back.members(), d.members());
            assert_relative_eq!(back.zstar(), d.zstar(), max_relative = 1e-14);
        }
    }

    #[test]
    fn canonicalization_is_idempotent_and_complement_stable() {
        for (members, zstar, q) in [
            (vec![1usize], 4.0f64, 3usize),
            (vec![1, 2, 3], 5.0, 4),
            (vec![1, 2], 0.3, 4),
            (vec![3], 0.25, 3),
        ] {
            let d = MeasureDescriptor::new(members, zstar).unwrap();
            let canon = canonicalize(d.clone(), q).unwrap();
            let twice = canonicalize(canon.clone(), q).unwrap();
            assert!(canon.approx_same(&twice));
            let via_complement =
                canonicalize(complement_descriptor(&d, q).unwrap(), q).unwrap();
            assert!(canon.approx_same(&via_complement));
            assert!(2 * canon.size() <= q);
            if 2 * canon.size() == q {
                assert!(canon.zstar() > 1.0);
            }
        }
    }

    #[test]
    fn boundary_law_vector_examples() {
        let z = 11.656854f64;
        let d = MeasureDescriptor::new(vec![1], z).unwrap();
        assert_eq!(boundary_law_vector(&d, 3).unwrap().z(), &[z, 1.0]);

        let free = MeasureDescriptor::<f64>::free();
        assert_eq!(boundary_law_vector(&free, 3).unwrap().z(), &[1.0, 1.0]);

        // q ∈ M rewrites through the complement.
        let d = MeasureDescriptor::new(vec![3], z).unwrap();
        let law = boundary_law_vector(&d, 3).unwrap();
        assert_relative_eq!(law.z()[0], 1.0 / z, max_relative = 1e-14);
        assert_relative_eq!(law.z()[1], 1.0 / z, max_relative = 1e-14);
    }

    #[test]
    fn boundary_law_rejects_out_of_range_members() {
        let d = MeasureDescriptor::new(vec![5], 2.0f64).unwrap();
        assert!(boundary_law_vector(&d, 3).is_err());
        assert!(complement_descriptor(&d, 3).is_err());
    }

    #[test]
    fn record_serialization_shape() {
        let p = params(3, 2, 5.0);
        let measures = enumerate_tisgm(&p).unwrap();
        let records = descriptor_records(&measures, Regime::AllOpen);
        let json = serde_json::to_string(&records[0]).unwrap();
        assert_eq!(json, r#"{"M":[],"zstar":1.0,"m":0,"regime":"all_open"}"#);
        let parsed: Vec<DescriptorRecord> =
            serde_json::from_str(&serde_json::to_string(&records).unwrap()).unwrap();
        assert_eq!(parsed.len(), 7);
    }
}
