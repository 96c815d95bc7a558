//! Verification report: runs the whole oracle battery against the enumerated
//! measures and emits a machine-readable summary.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::enumerate::{
    boundary_law_vector, count_tisgm_with, descriptor_records, enumerate_tisgm_with,
    DescriptorRecord,
};
use crate::error::Result;
use crate::model::{BoundaryLaw, PottsParams};
use crate::oracle::exhaustive::{
    check_compatibility, root_marginal, verify_complement_identity,
};
use crate::oracle::hull::hull_extremality_check;
use crate::oracle::solver::multi_start_solver;
use crate::recursion::vector_residual;
use crate::tol::{self, Tolerances};

/// Settings of one verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    /// Volume depth n for the exhaustive checks.
    pub depth: usize,
    /// Multi-start count.
    pub starts: usize,
    /// RNG seed for the multi-start search and the random non-fixed laws.
    pub seed: u64,
    /// Tolerance overrides.
    pub tols: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { depth: 2, starts: 5000, seed: 0, tols: Tolerances::default() }
    }
}

/// One named check. Numeric fields are rendered as strings so reports are
/// byte-stable across JSON parsers.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub inputs: serde_json::Value,
    pub residual: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub q: usize,
    pub k: usize,
    pub theta: String,
    pub depth: usize,
    pub starts: usize,
    pub seed: u64,
    pub regime: String,
    pub count: u64,
    pub descriptors: Vec<DescriptorRecord>,
    pub checks: Vec<CheckResult>,
    /// Deepest volume exercised; hull feasibility at this volume is
    /// inconclusive rather than negative, deeper volumes may separate more.
    pub deepest_volume_tested: usize,
    pub dropped_starts: usize,
    pub warnings: Vec<String>,
    pub all_pass: bool,
}

/// 12-significant-digit rendering used for all numeric report and table
/// fields.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let formatted = format!("{x:.11e}");
    // Re-render small/large magnitudes positionally when compact.
    let abs = x.abs();
    if (1e-4..1e13).contains(&abs) {
        let digits = abs.log10().floor() as i32;
        let decimals = (11 - digits).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        formatted
    }
}

fn check(name: impl Into<String>, inputs: serde_json::Value, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        inputs,
        residual: sig12(residual),
        tolerance: sig12(tolerance),
        pass: residual <= tolerance,
    }
}

/// Lower-bound check: passes when the residual *exceeds* the threshold.
fn check_floor(name: impl Into<String>, inputs: serde_json::Value, residual: f64, floor: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        inputs,
        residual: sig12(residual),
        tolerance: format!(">{}", sig12(floor)),
        pass: residual > floor,
    }
}

fn mixed_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Violation of the two-value component structure: 0 when the law has at
/// most two distinct component values with one ≈ 1 whenever there are two.
fn structure_violation(z: &[f64]) -> f64 {
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("law components are finite"));
    let mut groups: Vec<f64> = Vec::new();
    for v in sorted {
        if groups.last().is_none_or(|g| (v - g).abs() > 1e-7 * g.max(1.0)) {
            groups.push(v);
        }
    }
    match groups.len() {
        0 | 1 => 0.0,
        2 => groups.iter().map(|g| (g - 1.0).abs()).fold(f64::INFINITY, f64::min),
        _ => 1.0,
    }
}

/// Draws a random law that is decisively not a fixed point (componentwise
/// residual ≥ 1e-2), log-uniform in z ∈ [1e-3, 1e3]^{q-1}.
fn random_non_fixed_law(
    rng: &mut ChaCha8Rng,
    params: &PottsParams<f64>,
) -> Result<BoundaryLaw<f64>> {
    loop {
        let z: Vec<f64> = (0..params.q() - 1)
            .map(|_| 10f64.powf(rng.gen_range(-3.0..3.0)))
            .collect();
        let law = BoundaryLaw::from_z(z)?;
        if vector_residual(&law, params)? >= 1e-2 {
            return Ok(law);
        }
    }
}

/// Runs compatibility, complement-identity, depth-independence, oracle-count,
/// structure, and hull checks against the enumerated measures.
pub fn run_verification(
    params: &PottsParams<f64>,
    exact_theta: Option<&BigRational>,
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    let q = params.q();
    let classification = count_tisgm_with(params, exact_theta, &cfg.tols)?;
    let measures = enumerate_tisgm_with(params, exact_theta, &cfg.tols)?;
    let records = descriptor_records(&measures, classification.regime);
    let laws: Vec<BoundaryLaw<f64>> = measures
        .iter()
        .map(|d| boundary_law_vector(d, q))
        .collect::<Result<Vec<_>>>()?;

    let mut checks: Vec<CheckResult> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    checks.push(check(
        "count_vs_enumeration",
        json!({"count": classification.count, "enumerated": measures.len()}),
        (measures.len() as f64 - classification.count as f64).abs(),
        0.0,
    ));

    // Fixed-point residual and compatibility of every enumerated measure.
    for (i, law) in laws.iter().enumerate() {
        let residual = vector_residual(law, params)?;
        checks.push(check(
            format!("fixed_point_residual[{i}]"),
            json!({"descriptor": records[i]}),
            residual,
            tol::FIXED_POINT_RESIDUAL,
        ));
        let defect = check_compatibility(cfg.depth, law, params)?;
        checks.push(check(
            format!("compatibility[{i}]"),
            json!({"descriptor": records[i], "depth": cfg.depth}),
            defect,
            tol::COMPATIBILITY_TOL,
        ));
    }

    // Fifty seeded random non-fixed laws must all fail compatibility.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut min_defect = f64::INFINITY;
    for _ in 0..50 {
        let law = random_non_fixed_law(&mut rng, params)?;
        let defect = check_compatibility(cfg.depth, &law, params)?;
        min_defect = min_defect.min(defect);
    }
    checks.push(check_floor(
        "compatibility_random_laws_floor",
        json!({"laws": 50, "depth": cfg.depth}),
        min_defect,
        1e-4,
    ));

    // Complement identity on all non-free measures.
    for (i, d) in measures.iter().enumerate() {
        if d.is_free() {
            continue;
        }
        let defect = verify_complement_identity(d, cfg.depth, params)?;
        checks.push(check(
            format!("complement_identity[{i}]"),
            json!({"descriptor": records[i], "depth": cfg.depth}),
            defect,
            tol::COMPATIBILITY_TOL,
        ));
    }

    // Depth independence of root marginals, and uniformity for the free law.
    for (i, d) in measures.iter().enumerate() {
        let shallow = root_marginal(d, 1, params)?;
        let deep = root_marginal(d, cfg.depth, params)?;
        let drift = shallow
            .iter()
            .zip(&deep)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(check(
            format!("marginal_depth_agreement[{i}]"),
            json!({"descriptor": records[i], "depths": [1, cfg.depth]}),
            drift,
            1e-9,
        ));
        if d.is_free() {
            let uniform_err = shallow
                .iter()
                .map(|p| (p - 1.0 / q as f64).abs())
                .fold(0.0, f64::max);
            checks.push(check(
                format!("free_marginal_uniform[{i}]"),
                json!({"q": q}),
                uniform_err,
                tol::NORMALIZATION_TOL,
            ));
        }
    }

    // Independent multi-start census of the full system.
    let outcome = multi_start_solver(params, cfg.starts, cfg.seed)?;
    checks.push(check(
        "oracle_cluster_count",
        json!({"starts": cfg.starts, "seed": cfg.seed, "clusters": outcome.fixed_points.len()}),
        (outcome.fixed_points.len() as f64 - classification.count as f64).abs(),
        0.0,
    ));
    let mut worst_match = 0.0f64;
    let mut used = vec![false; laws.len()];
    for law in &outcome.fixed_points {
        let mut best = f64::INFINITY;
        let mut best_idx = None;
        for (j, expected) in laws.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = mixed_distance(law.z(), expected.z());
            if dist < best {
                best = dist;
                best_idx = Some(j);
            }
        }
        if let Some(j) = best_idx {
            used[j] = true;
        }
        worst_match = worst_match.max(best);
    }
    checks.push(check(
        "oracle_cluster_match",
        json!({"clusters": outcome.fixed_points.len()}),
        worst_match,
        tol::CLUSTER_TOL,
    ));
    let worst_structure = outcome
        .fixed_points
        .iter()
        .map(|law| structure_violation(law.z()))
        .fold(0.0, f64::max);
    checks.push(check(
        "two_value_structure",
        json!({"clusters": outcome.fixed_points.len()}),
        worst_structure,
        tol::CLUSTER_TOL,
    ));
    if outcome.dropped_starts > 0 {
        warnings.push(format!("{} of {} starts did not converge", outcome.dropped_starts, outcome.starts));
    }

    // Hull extremality (sufficient condition at this volume).
    if measures.len() >= 2 {
        let verdicts = hull_extremality_check(&measures, cfg.depth, params)?;
        for v in &verdicts {
            checks.push(check_floor(
                format!("hull_vertex[{}]", v.index),
                json!({"descriptor": records[v.index], "depth": cfg.depth}),
                v.margin,
                1e-6,
            ));
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schema_version: 1,
        q,
        k: params.k(),
        theta: sig12(params.theta()),
        depth: cfg.depth,
        starts: cfg.starts,
        seed: cfg.seed,
        regime: classification.regime.to_string(),
        count: classification.count,
        descriptors: records,
        checks,
        deepest_volume_tested: cfg.depth,
        dropped_starts: outcome.dropped_starts,
        warnings,
        all_pass,
    })
}
