//! Convex-hull membership by linear feasibility, certifying that each
//! measure is not a mixture of the others.
//!
//! For a target cylinder vector t and candidate vectors P_j the program asks
//! for convex weights α ≥ 0, Σα = 1 with Σ α_j P_j = t. A phase-1 simplex
//! minimizes the total artificial mass; an optimum above the feasibility
//! tolerance is an infeasibility certificate and its magnitude (the least
//! achievable L1 deviation) is reported as the margin. Feasibility at a
//! finite volume is only "inconclusive", never a refutation of extremality.

#![allow(clippy::needless_range_loop)]

use crate::error::{PottsError, Result};
use crate::model::{MeasureDescriptor, PottsParams};
use crate::oracle::exhaustive::cylinder_distribution;
use crate::scalar::{cst, Real};
use crate::tol;

/// Outcome of the hull membership test for one measure.
#[derive(Debug, Clone, Copy)]
pub struct HullVerdict<R> {
    /// Index of the tested measure in the input list.
    pub index: usize,
    /// `true` when the LP certifies the vector lies outside the hull of the
    /// others (a sufficient condition for extremality at this volume).
    pub is_vertex: bool,
    /// Least L1 deviation between the target and the hull; ≈ 0 when feasible.
    pub margin: R,
    /// Set when the target duplicates another input vector (degenerate
    /// program, reported rather than resolved).
    pub duplicate_of: Option<usize>,
}

/// Phase-1 simplex: minimize the total artificial mass of
/// `[P | I] [α; s] = [t; 1]`, `α, s ≥ 0`. Returns the optimum.
///
/// Bland's rule plus barring re-entry of departed artificials guarantees
/// termination; all right-hand sides are probabilities, so no row scaling is
/// needed.
fn phase1_deviation<R: Real>(points: &[Vec<R>], target: &[R]) -> Result<R> {
    let d = target.len();
    let rows = d + 1;
    let n = points.len();
    let cols = n + rows;
    let eps = cst::<R>(1e-11);

    // Tableau rows: structural columns, artificial identity, RHS.
    let mut tab = vec![vec![R::zero(); cols + 1]; rows];
    for (j, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(PottsError::InvalidParameter(
                "hull points must share the target dimension".into(),
            ));
        }
        for i in 0..d {
            tab[i][j] = p[i];
        }
        tab[rows - 1][j] = R::one(); // convexity row
    }
    for i in 0..rows {
        tab[i][n + i] = R::one();
        tab[i][cols] = if i < d { target[i] } else { R::one() };
    }

    let mut basis: Vec<usize> = (n..cols).collect();
    let mut barred = vec![false; cols];

    for _ in 0..20_000 {
        // Reduced costs under c = 1 on artificials, 0 on structurals.
        let mut entering = None;
        for j in 0..cols {
            if barred[j] || basis.contains(&j) {
                continue;
            }
            let cost_j = if j >= n { R::one() } else { R::zero() };
            let mut z_j = R::zero();
            for i in 0..rows {
                if basis[i] >= n {
                    z_j = z_j + tab[i][j];
                }
            }
            if cost_j - z_j < -eps {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(j) = entering else { break };

        let mut leaving: Option<usize> = None;
        for i in 0..rows {
            if tab[i][j] > eps {
                let better = match leaving {
                    None => true,
                    Some(l) => {
                        let ratio_i = tab[i][cols] / tab[i][j];
                        let ratio_l = tab[l][cols] / tab[l][j];
                        ratio_i < ratio_l || (ratio_i == ratio_l && basis[i] < basis[l])
                    }
                };
                if better {
                    leaving = Some(i);
                }
            }
        }
        let Some(l) = leaving else {
            // Unbounded phase-1 cannot happen with a bounded feasible region;
            // flag it instead of guessing.
            return Err(PottsError::NumericalAnomaly(
                "phase-1 simplex reported an unbounded direction".into(),
            ));
        };

        let pivot = tab[l][j];
        for v in tab[l].iter_mut() {
            *v = *v / pivot;
        }
        for i in 0..rows {
            if i != l && tab[i][j].abs() > R::zero() {
                let factor = tab[i][j];
                for c in 0..=cols {
                    let upd = tab[l][c] * factor;
                    tab[i][c] = tab[i][c] - upd;
                }
            }
        }
        if basis[l] >= n {
            barred[basis[l]] = true;
        }
        basis[l] = j;
    }

    let mut objective = R::zero();
    for i in 0..rows {
        if basis[i] >= n {
            objective = objective + tab[i][cols].max(R::zero());
        }
    }
    Ok(objective)
}

/// Tests every measure's V_1 cylinder vector (computed at volume V_n) for
/// membership in the convex hull of the others.
pub fn hull_extremality_check<R: Real>(
    descriptors: &[MeasureDescriptor<R>],
    depth: usize,
    params: &PottsParams<R>,
) -> Result<Vec<HullVerdict<R>>> {
    if descriptors.len() < 2 {
        return Err(PottsError::InvalidParameter(
            "hull check needs at least two measures".into(),
        ));
    }
    let vectors: Vec<Vec<R>> = descriptors
        .iter()
        .map(|d| cylinder_distribution(d, 1, depth, params))
        .collect::<Result<Vec<_>>>()?;

    let feas = cst::<R>(tol::HULL_FEASIBILITY_TOL);
    let mut verdicts = Vec::with_capacity(vectors.len());
    for (i, target) in vectors.iter().enumerate() {
        // Later copies of an identical vector are degenerate: report them
        // against the first occurrence instead of running the program.
        let duplicate_of = vectors[..i].iter().enumerate().find_map(|(j, other)| {
            let close = target
                .iter()
                .zip(other)
                .all(|(a, b)| (*a - *b).abs() <= cst::<R>(1e-12));
            close.then_some(j)
        });
        if let Some(j) = duplicate_of {
            verdicts.push(HullVerdict {
                index: i,
                is_vertex: false,
                margin: R::zero(),
                duplicate_of: Some(j),
            });
            continue;
        }
        let others: Vec<Vec<R>> = vectors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        let deviation = phase1_deviation(&others, target)?;
        verdicts.push(HullVerdict {
            index: i,
            is_vertex: deviation > feas,
            margin: deviation,
            duplicate_of: None,
        });
    }
    Ok(verdicts)
}
