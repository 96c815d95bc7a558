//! Seeded multi-start search for every fixed point of the full
//! (q−1)-dimensional boundary-law system.
//!
//! Starts are drawn log-uniformly from z ∈ [1e-3, 1e3]^{q−1}. Each start is
//! driven three ways: geometric damping z ← z^{1/2} f(z)^{1/2} (the averaged
//! map in field coordinates) followed by a Newton polish, a damped Newton
//! iteration on the log-scale residual h − k·F(h) straight from the raw
//! start, and a Newton pass on the residual deflated against every root
//! found so far. Damping alone only reaches attracting fixed points, and
//! plain Newton basins of repelling fixed points can be minuscule; the
//! deflation pass is what makes the census exhaustive in practice.
//! Acceptance always tests the undeflated componentwise residual, so
//! deflation steers the iteration without touching the pass criterion.
//! Converged candidates are clustered and each cluster keeps its
//! best-residual representative. Everything is deterministic for a fixed
//! seed.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PottsError, Result};
use crate::model::{BoundaryLaw, PottsParams};
use crate::recursion::vector_residual;
use crate::scalar::{cst, int, Real};
use crate::tol;

/// Result of a multi-start run.
#[derive(Debug, Clone)]
pub struct MultiStartOutcome<R> {
    /// Distinct fixed points, sorted lexicographically by components.
    pub fixed_points: Vec<BoundaryLaw<R>>,
    /// Starts with at least one converged branch.
    pub converged_starts: usize,
    /// Starts where no branch converged.
    pub dropped_starts: usize,
    /// Total starts requested.
    pub starts: usize,
}

/// F(h, θ) and the residual r(h) = h − k·F(h) with its analytic Jacobian.
struct LogResidual<R> {
    theta: R,
    k: R,
}

impl<R: Real> LogResidual<R> {
    fn new(params: &PottsParams<R>) -> Self {
        Self { theta: params.theta(), k: int(params.k()) }
    }

    fn residual(&self, h: &[R], out: &mut [R]) {
        // N_i − D = (θ−1)(z_i − 1), so the map is ln(1 + (θ−1)(z_i−1)/D).
        // The expm1/ln_1p form keeps the residual accurate near the trivial
        // fixed point, where plain differencing cancels; that precision is
        // what lets Newton resolve degenerate (critical-θ) fixed points.
        let zm1: Vec<R> = h.iter().map(|hi| hi.exp_m1()).collect();
        let s_minus: R = zm1.iter().copied().sum();
        let denom = self.theta + int::<R>(h.len()) + s_minus;
        for i in 0..h.len() {
            out[i] = h[i] - self.k * ((self.theta - R::one()) * zm1[i] / denom).ln_1p();
        }
    }

    /// Jacobian of the residual: δ_ij − k · ∂F_i/∂h_j.
    fn jacobian(&self, h: &[R], jac: &mut [Vec<R>]) {
        let n = h.len();
        let z: Vec<R> = h.iter().map(|hi| hi.exp()).collect();
        let s: R = z.iter().copied().sum();
        let denom = self.theta + s;
        for i in 0..n {
            let num = (self.theta - R::one()) * z[i] + s + R::one();
            for j in 0..n {
                let mut df = z[j] / num - z[j] / denom;
                if i == j {
                    df = df + (self.theta - R::one()) * z[i] / num;
                }
                jac[i][j] = if i == j { R::one() } else { R::zero() } - self.k * df;
            }
        }
    }
}

/// Solves the dense system in place by Gaussian elimination with partial
/// pivoting; the dimension is q−1, at most a handful.
fn solve_linear<R: Real>(a: &mut [Vec<R>], b: &mut [R]) -> Option<Vec<R>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < cst(1e-300) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let upd = a[col][k] * factor;
                a[row][k] = a[row][k] - upd;
            }
            b[row] = b[row] - b[col] * factor;
        }
    }
    let mut x = vec![R::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for col in row + 1..n {
            acc = acc - a[row][col] * x[col];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

const FIELD_BOX: f64 = 60.0;
const MAX_NEWTON_STEP: f64 = 1.5;

/// Damped Newton on the log-scale residual, optionally deflated against
/// already-found roots. Returns the final iterate when the plain residual
/// target is reached.
///
/// Deflation multiplies the residual by Π_i (1 + 1/‖h − h_i‖²); the factor
/// never vanishes, so deflated roots are exactly the undiscovered roots of
/// the plain residual, and convergence is always judged undeflated.
fn newton_from<R: Real>(
    system: &LogResidual<R>,
    start: &[R],
    deflate: &[Vec<R>],
    max_iter: usize,
) -> Option<Vec<R>> {
    let n = start.len();
    let mut h = start.to_vec();
    let mut r = vec![R::zero(); n];
    let mut jac = vec![vec![R::zero(); n]; n];
    // Degenerate (critical-θ) roots only converge linearly; after first
    // reaching the target, a few more halvings tighten the iterate so all
    // arrivals at one root land inside a single cluster.
    let mut best: Option<(Vec<R>, R)> = None;
    let mut polish_left = 6usize;
    for _ in 0..max_iter {
        system.residual(&h, &mut r);
        let norm = r.iter().fold(R::zero(), |acc, v| acc.max(v.abs()));
        if norm <= cst(1e-13) {
            if best.as_ref().is_none_or(|(_, bn)| norm < *bn) {
                best = Some((h.clone(), norm));
            }
            if polish_left == 0 {
                break;
            }
            polish_left -= 1;
        }
        if let Some((hb, _)) = &best {
            if norm > cst(1e-10) {
                // The polish wandered off; keep the converged iterate.
                return Some(hb.clone());
            }
        }
        system.jacobian(&h, &mut jac);
        let mut a = jac.clone();
        let mut rhs = r.clone();
        if !deflate.is_empty() {
            // r̃ = m·r with m = Π_i (1 + d_i⁻²) and
            // ∇m = m · Σ_i −2 (h − h_i)/(d_i⁴ + d_i²); the Jacobian picks up
            // the rank-one term r ∇mᵀ.
            let mut log_grad = vec![R::zero(); n];
            let mut factor = R::one();
            for root in deflate {
                let mut d2 = R::zero();
                for i in 0..n {
                    let diff = h[i] - root[i];
                    d2 = d2 + diff * diff;
                }
                if d2 <= cst(1e-24) {
                    // Landed on a known root; deflation has nothing new here.
                    return best.map(|(hb, _)| hb);
                }
                factor = factor * (R::one() + R::one() / d2);
                let denom = d2 * d2 + d2;
                for i in 0..n {
                    log_grad[i] = log_grad[i] - cst::<R>(2.0) * (h[i] - root[i]) / denom;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    a[i][j] = factor * a[i][j] + r[i] * factor * log_grad[j];
                }
                rhs[i] = factor * rhs[i];
            }
        }
        let Some(delta) = solve_linear(&mut a, &mut rhs) else {
            // Singular Jacobian; exactly-degenerate points trip this at the
            // root itself, where the converged iterate is already in hand.
            return best.map(|(hb, _)| hb);
        };
        let step_norm = delta.iter().fold(R::zero(), |acc, v| acc.max(v.abs()));
        let scale = if step_norm > cst(MAX_NEWTON_STEP) {
            cst::<R>(MAX_NEWTON_STEP) / step_norm
        } else {
            R::one()
        };
        for i in 0..n {
            h[i] = h[i] - delta[i] * scale;
            if h[i].abs() > cst(FIELD_BOX) {
                return best.map(|(hb, _)| hb);
            }
        }
    }
    if let Some((hb, _)) = best {
        return Some(hb);
    }
    system.residual(&h, &mut r);
    let norm = r.iter().fold(R::zero(), |acc, v| acc.max(v.abs()));
    (norm <= cst(tol::SOLVER_CONVERGENCE)).then_some(h)
}

/// Geometric damping z ← z^{1/2} f(z)^{1/2}, i.e. h ← (h + kF(h))/2.
fn damped_orbit<R: Real>(system: &LogResidual<R>, start: &[R], steps: usize) -> Vec<R> {
    let n = start.len();
    let mut h = start.to_vec();
    let mut r = vec![R::zero(); n];
    let half = cst::<R>(0.5);
    for _ in 0..steps {
        // r = h − kF, so the averaged update is h − r/2.
        system.residual(&h, &mut r);
        let mut moved = R::zero();
        for i in 0..n {
            let step = r[i] * half;
            h[i] = h[i] - step;
            moved = moved.max(step.abs());
            if h[i].abs() > cst(FIELD_BOX) {
                h[i] = h[i].signum() * cst(FIELD_BOX);
            }
        }
        if moved <= cst(1e-14) {
            break;
        }
    }
    h
}

/// Second-order sharpening for degenerate roots.
///
/// At a tangential fixed point the residual is flat — |r| stays below the
/// evaluation noise over a ±√ε neighborhood — so Newton arrivals scatter
/// more widely than the cluster tolerance. The valley bottom is still
/// well-conditioned through the *derivative*: along the Jacobian's near-null
/// direction v, the scalar ψ(s) = vᵀ J(h + s·v) v crosses zero linearly.
/// When the Jacobian is near-singular, slide to that zero; otherwise leave
/// the candidate untouched.
fn degenerate_polish<R: Real>(system: &LogResidual<R>, h: &mut [R]) {
    let n = h.len();
    let mut jac = vec![vec![R::zero(); n]; n];
    system.jacobian(h, &mut jac);

    // Near-null direction by inverse iteration from a fixed, asymmetric seed.
    let mut v: Vec<R> = (1..=n).map(int::<R>).collect();
    normalize(&mut v);
    let mut amplified = false;
    for _ in 0..3 {
        let mut a = jac.clone();
        let mut rhs = v.clone();
        let Some(w) = solve_linear(&mut a, &mut rhs) else {
            return;
        };
        let norm = w.iter().fold(R::zero(), |acc, x| acc.max(x.abs()));
        if !norm.is_finite() || norm <= R::zero() {
            return;
        }
        if norm > cst(1e6) {
            amplified = true;
        }
        v = w;
        normalize(&mut v);
    }
    if !amplified {
        return;
    }

    let mut r = vec![R::zero(); n];
    system.residual(h, &mut r);
    let before = r.iter().fold(R::zero(), |acc, x| acc.max(x.abs()));

    let mut probe = vec![R::zero(); n];
    let mut psi = |s: R, jac: &mut Vec<Vec<R>>| -> R {
        for i in 0..n {
            probe[i] = h[i] + s * v[i];
        }
        system.jacobian(&probe, jac);
        let mut acc = R::zero();
        for (i, vi) in v.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                acc = acc + *vi * jac[i][j] * *vj;
            }
        }
        acc
    };

    let eps = cst::<R>(1e-5);
    let mut s = R::zero();
    for _ in 0..8 {
        let slope = (psi(s + eps, &mut jac) - psi(s - eps, &mut jac)) / (cst::<R>(2.0) * eps);
        if slope.abs() <= cst(1e-12) {
            return;
        }
        let step = psi(s, &mut jac) / slope;
        s = s - step;
        if s.abs() > cst(1e-3) {
            return; // not a local valley; leave the candidate alone
        }
        if step.abs() <= cst(1e-15) {
            break;
        }
    }

    let candidate: Vec<R> = h.iter().zip(&v).map(|(hi, vi)| *hi + s * *vi).collect();
    system.residual(&candidate, &mut r);
    let after = r.iter().fold(R::zero(), |acc, x| acc.max(x.abs()));
    if after <= before.max(cst(1e-13)) {
        h.copy_from_slice(&candidate);
    }
}

fn normalize<R: Real>(v: &mut [R]) {
    let norm = v.iter().map(|x| *x * *x).sum::<R>().sqrt();
    if norm > R::zero() {
        for x in v.iter_mut() {
            *x = *x / norm;
        }
    }
}

fn cluster_distance<R: Real>(a: &[R], b: &[R]) -> R {
    let mut worst = R::zero();
    for (x, y) in a.iter().zip(b) {
        let scale = R::one().max(x.abs()).max(y.abs());
        worst = worst.max((*x - *y).abs() / scale);
    }
    worst
}

/// Finds the fixed points of the full system reachable from `n_starts`
/// seeded random starts; returned laws all satisfy the componentwise
/// fixed-point residual bound 1e-9.
pub fn multi_start_solver<R: Real>(
    params: &PottsParams<R>,
    n_starts: usize,
    seed: u64,
) -> Result<MultiStartOutcome<R>> {
    if n_starts == 0 {
        return Err(PottsError::InvalidParameter("n_starts must be >= 1".into()));
    }
    let n = params.q() - 1;
    let system = LogResidual::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln10 = cst::<R>(std::f64::consts::LN_10);

    // Clusters as (z-representative, its residual, field coordinates).
    let mut reps: Vec<(Vec<R>, R, Vec<R>)> = Vec::new();
    let mut converged_starts = 0usize;
    let mut dropped_starts = 0usize;

    for _ in 0..n_starts {
        let start: Vec<R> =
            (0..n).map(|_| cst::<R>(rng.gen_range(-3.0..3.0)) * ln10).collect();
        let damped = damped_orbit(&system, &start, 200);
        let known: Vec<Vec<R>> = reps.iter().map(|(_, _, h)| h.clone()).collect();
        let candidates = [
            newton_from(&system, &damped, &[], 60),
            newton_from(&system, &start, &[], 80),
            newton_from(&system, &start, &known, 80),
            newton_from(&system, &damped, &known, 80),
        ];
        let mut any = false;
        for mut candidate in candidates.into_iter().flatten() {
            degenerate_polish(&system, &mut candidate);
            let law = BoundaryLaw::from_h(candidate.clone())?;
            let residual = vector_residual(&law, params)?;
            if residual > cst(tol::FIXED_POINT_RESIDUAL) {
                continue;
            }
            any = true;
            let z: Vec<R> = law.z().to_vec();
            match reps
                .iter_mut()
                .find(|(rep, _, _)| cluster_distance(rep, &z) <= cst(tol::CLUSTER_TOL))
            {
                Some(entry) => {
                    if residual < entry.1 {
                        *entry = (z, residual, candidate);
                    }
                }
                None => reps.push((z, residual, candidate)),
            }
        }
        if any {
            converged_starts += 1;
        } else {
            dropped_starts += 1;
        }
    }

    reps.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).expect("fixed-point components are finite")
    });
    let fixed_points = reps
        .into_iter()
        .map(|(z, _, _)| BoundaryLaw::from_z(z))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiStartOutcome { fixed_points, converged_starts, dropped_starts, starts: n_starts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{boundary_law_vector, enumerate_tisgm};

    fn params(q: usize, k: usize, theta: f64) -> PottsParams<f64> {
        PottsParams::with_theta(q, k, theta).unwrap()
    }

    #[test]
    fn finds_all_seven_fixed_points_in_the_open_regime() {
        let p = params(3, 2, 5.0);
        let outcome = multi_start_solver(&p, 3000, 7).unwrap();
        assert_eq!(outcome.fixed_points.len(), 7);
        // Bijection against the enumerated canonical laws.
        let expected: Vec<BoundaryLaw<f64>> = enumerate_tisgm(&p)
            .unwrap()
            .iter()
            .map(|d| boundary_law_vector(d, 3).unwrap())
            .collect();
        let mut used = vec![false; expected.len()];
        for law in &outcome.fixed_points {
            let hit = expected.iter().enumerate().find(|(j, e)| {
                !used[*j] && cluster_distance(law.z(), e.z()) <= 1e-7
            });
            let (j, _) = hit.expect("every cluster matches an enumerated law");
            used[j] = true;
        }
        assert!(used.iter().all(|&u| u));
    }

    #[test]
    fn unique_regime_collapses_to_the_free_law() {
        let p = params(3, 2, 3.0);
        let outcome = multi_start_solver(&p, 1200, 11).unwrap();
        assert_eq!(outcome.fixed_points.len(), 1);
        for &z in outcome.fixed_points[0].z() {
            assert!((z - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn ising_low_temperature_has_three() {
        let p = params(2, 2, 4.0);
        let outcome = multi_start_solver(&p, 1200, 3).unwrap();
        assert_eq!(outcome.fixed_points.len(), 3);
    }

    #[test]
    fn two_value_structure_of_every_fixed_point() {
        // Components take at most two distinct values; when there are two,
        // one of them is 1.
        let p = params(4, 2, 6.0);
        let outcome = multi_start_solver(&p, 4000, 23).unwrap();
        assert_eq!(outcome.fixed_points.len(), 15);
        for law in &outcome.fixed_points {
            let mut values: Vec<f64> = law.z().to_vec();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut groups: Vec<f64> = Vec::new();
            for v in values {
                if groups.last().is_none_or(|g| (v - g).abs() > 1e-7 * g.max(1.0)) {
                    groups.push(v);
                }
            }
            assert!(groups.len() <= 2, "three distinct component values in {:?}", law.z());
            if groups.len() == 2 {
                assert!(
                    groups.iter().any(|g| (g - 1.0).abs() <= 1e-7),
                    "no unit component in {:?}",
                    law.z()
                );
            }
        }
    }

    #[test]
    fn census_resolves_degenerate_points_at_critical_weights() {
        // At θ_c the free fixed point is fully degenerate (the linearized
        // residual vanishes); at θ_m the tangential point is degenerate
        // along its scalar direction. Each must still land in one cluster.
        let p = params(3, 2, 4.0); // θ_c
        let outcome = multi_start_solver(&p, 2000, 5).unwrap();
        assert_eq!(outcome.fixed_points.len(), 4);
        assert!(outcome
            .fixed_points
            .iter()
            .any(|law| law.z().iter().all(|&z| (z - 1.0).abs() <= 1e-7)));

        let p = params(3, 2, 1.0 + 2.0 * 2.0f64.sqrt()); // θ_1
        let outcome = multi_start_solver(&p, 2000, 5).unwrap();
        assert_eq!(outcome.fixed_points.len(), 4);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = params(3, 2, 4.5);
        let a = multi_start_solver(&p, 500, 99).unwrap();
        let b = multi_start_solver(&p, 500, 99).unwrap();
        assert_eq!(a.fixed_points.len(), b.fixed_points.len());
        for (x, y) in a.fixed_points.iter().zip(&b.fixed_points) {
            assert_eq!(x.z(), y.z());
        }
        assert_eq!(a.converged_starts, b.converged_starts);
    }

    #[test]
    fn rejects_zero_starts() {
        assert!(multi_start_solver(&params(3, 2, 5.0), 0, 1).is_err());
    }
}
