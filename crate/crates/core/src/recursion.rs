//! The boundary-law recursion map, its scalar reduction, and the polynomial
//! root machinery that locates every candidate fixed point.
//!
//! A translation-invariant law z solves the componentwise fixed-point system
//!
//! ```text
//! z_i = ( ((θ-1) z_i + Σ_j z_j + 1) / (θ + Σ_j z_j) )^k ,   i = 1..q-1.
//! ```
//!
//! Every solution has at most two distinct component values, one of them 1,
//! which reduces the system to the scalar equation z = f_m(z) for the size m
//! of the non-unit block. In the variable x = z^{1/k} the non-trivial fixed
//! points of f_m are exactly the positive roots of
//!
//! ```text
//! φ_m(x, θ) = m x^k − (θ−1)(x^{k−1} + … + x) + q − m ,
//! ```
//!
//! whose coefficient signs change exactly twice, so there are 0 or 2 positive
//! roots counted with multiplicity. `solve_phi` exploits that shape: a
//! geometric sign-scan, bisection and Newton polish for simple roots, and a
//! derivative-polished minimum search for the tangential (double-root) case.

use crate::error::{PottsError, Result};
use crate::model::{theta_close, BoundaryLaw, PottsParams};
use crate::rootfind::{
    bisect, geometric_grid, golden_min, newton_polish, polish_stationary, power_sum,
    weighted_power_sum, Bracket,
};
use crate::scalar::{cst, int, Real};
use crate::tol::{self, Tolerances};

/// One positive root of φ_m with its multiplicity (1 or 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<R> {
    pub x: R,
    pub multiplicity: u8,
}

/// The positive roots of φ_m, sorted ascending, with total multiplicity ≤ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<R> {
    roots: Vec<Root<R>>,
}

impl<R: Real> RootSet<R> {
    pub(crate) fn empty() -> Self {
        Self { roots: Vec::new() }
    }

    fn from_parts(mut parts: Vec<(R, u8)>) -> Result<Self> {
        parts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("roots are finite"));
        let total: u32 = parts.iter().map(|&(_, m)| u32::from(m)).sum();
        if total > 2 {
            return Err(PottsError::NumericalAnomaly(format!(
                "root finder produced total multiplicity {total} > 2: {parts:?}"
            )));
        }
        if parts.iter().any(|&(_, m)| m == 2) && parts.len() != 1 {
            return Err(PottsError::NumericalAnomaly(
                "a double root must be the only root".into(),
            ));
        }
        for &(x, _) in &parts {
            if !(x > R::zero()) || !x.is_finite() {
                return Err(PottsError::NumericalAnomaly(format!(
                    "non-positive root candidate {x}"
                )));
            }
        }
        Ok(Self {
            roots: parts.into_iter().map(|(x, multiplicity)| Root { x, multiplicity }).collect(),
        })
    }

    pub fn roots(&self) -> &[Root<R>] {
        &self.roots
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of listed roots (a double root is listed once).
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| u32::from(r.multiplicity)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Root<R>> {
        self.roots.iter()
    }
}

/// Applies the recursion map F componentwise in field coordinates:
/// `F_i = ln( ((θ−1) e^{h_i} + Σ_j e^{h_j} + 1) / (θ + Σ_j e^{h_j}) )`.
///
/// Translation-invariant fixed points satisfy h = k·F(h, θ).
pub fn recursion_map<R: Real>(law: &BoundaryLaw<R>, params: &PottsParams<R>) -> Result<BoundaryLaw<R>> {
    check_dim(law, params)?;
    let theta = params.theta();
    let z = law.z();
    let s: R = z.iter().copied().sum();
    let denom = theta + s;
    let mapped: Vec<R> = z
        .iter()
        .map(|&zi| (((theta - R::one()) * zi + s + R::one()) / denom).ln())
        .collect();
    BoundaryLaw::from_h(mapped)
}

/// Componentwise residual of the fixed-point system in z-coordinates:
/// `max_i | z_i − (((θ−1) z_i + Σ z_j + 1)/(θ + Σ z_j))^k |`.
///
/// Zero (≤ 1e-10) exactly at fixed points.
pub fn vector_residual<R: Real>(law: &BoundaryLaw<R>, params: &PottsParams<R>) -> Result<R> {
    check_dim(law, params)?;
    let theta = params.theta();
    let k = params.k() as i32;
    let z = law.z();
    let s: R = z.iter().copied().sum();
    let denom = theta + s;
    let mut worst = R::zero();
    for &zi in z {
        let ratio = ((theta - R::one()) * zi + s + R::one()) / denom;
        let r = (zi - ratio.powi(k)).abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

fn check_dim<R: Real>(law: &BoundaryLaw<R>, params: &PottsParams<R>) -> Result<()> {
    if law.dim() != params.q() - 1 {
        return Err(PottsError::InvalidParameter(format!(
            "law has {} components, model needs q-1 = {}",
            law.dim(),
            params.q() - 1
        )));
    }
    Ok(())
}

fn check_m<R: Real>(m: usize, params: &PottsParams<R>) -> Result<()> {
    if m < 1 || m > params.q() - 1 {
        return Err(PottsError::InvalidParameter(format!(
            "m = {m} out of range 1..={}",
            params.q() - 1
        )));
    }
    Ok(())
}

/// The scalar reduction `f_m(z) = ( ((θ+m−1) z + q−m) / (m z + q−m−1+θ) )^k`.
///
/// Fixed points of `f_m` parameterize the laws whose non-unit block has size m.
pub fn scalar_map_fm<R: Real>(z: R, m: usize, params: &PottsParams<R>) -> Result<R> {
    check_m(m, params)?;
    if !(z > R::zero()) || !z.is_finite() {
        return Err(PottsError::InvalidParameter(format!("z = {z} must be positive")));
    }
    let theta = params.theta();
    let q = int::<R>(params.q());
    let mf = int::<R>(m);
    let num = (theta + mf - R::one()) * z + q - mf;
    let den = mf * z + q - mf - R::one() + theta;
    Ok((num / den).powi(params.k() as i32))
}

/// `φ_m(x, θ) = m x^k − (θ−1)(x^{k−1} + … + x) + q − m`.
///
/// In the scale x = z^{1/k}, the fixed points of f_m are exactly {1} joined
/// with the positive roots of φ_m.
pub fn phi<R: Real>(x: R, m: usize, params: &PottsParams<R>) -> Result<R> {
    check_m(m, params)?;
    let theta = params.theta();
    let k = params.k();
    Ok(int::<R>(m) * x.powi(k as i32) - (theta - R::one()) * power_sum(x, k - 1)
        + int::<R>(params.q() - m))
}

fn phi_raw<R: Real>(x: R, m: usize, q: usize, k: usize, theta: R) -> R {
    int::<R>(m) * x.powi(k as i32) - (theta - R::one()) * power_sum(x, k - 1) + int::<R>(q - m)
}

fn dphi_raw<R: Real>(x: R, m: usize, k: usize, theta: R) -> R {
    int::<R>(m * k) * x.powi(k as i32 - 1) - (theta - R::one()) * weighted_power_sum(x, k - 1)
}

fn d2phi_raw<R: Real>(x: R, m: usize, k: usize, theta: R) -> R {
    let mut sum = R::zero();
    let mut pow = R::one();
    for i in 2..k {
        sum = sum + int::<R>(i * (i - 1)) * pow;
        pow = pow * x;
    }
    int::<R>(m * k * (k - 1)) * x.powi(k as i32 - 2) - (theta - R::one()) * sum
}

/// Acceptance scale for the tangential root: `1e-8 · (m x^k + q)`.
fn double_root_scale<R: Real>(x: R, m: usize, q: usize, k: usize) -> R {
    cst::<R>(tol::DOUBLE_ROOT_COEFF) * (int::<R>(m) * x.powi(k as i32) + int::<R>(q))
}

/// All positive roots of `φ_m(·, θ)` with multiplicity.
pub fn solve_phi<R: Real>(m: usize, params: &PottsParams<R>) -> Result<RootSet<R>> {
    solve_phi_with(m, params, &Tolerances::default())
}

/// [`solve_phi`] with explicit tolerances.
pub fn solve_phi_with<R: Real>(
    m: usize,
    params: &PottsParams<R>,
    tols: &Tolerances,
) -> Result<RootSet<R>> {
    check_m(m, params)?;
    let (q, k, theta) = (params.q(), params.k(), params.theta());
    let f = |x: R| phi_raw(x, m, q, k, theta);
    let df = |x: R| dphi_raw(x, m, k, theta);
    let d2f = |x: R| d2phi_raw(x, m, k, theta);

    // Coefficient-derived bounds guarantee the scan covers every positive
    // root: upper from the polynomial itself, lower from its reflection.
    let theta_f = theta.to_f64().unwrap_or(f64::MAX);
    let upper = 1.0 + ((theta_f - 1.0).max((q - m) as f64)) / m as f64;
    let lower = 1.0 / (1.0 + (theta_f - 1.0).max(m as f64) / (q - m) as f64);
    let hi_dec = (upper.log10().ceil() as i32 + 1).max(8);
    let lo_dec = (lower.log10().floor() as i32 - 1).min(-8);
    let grid: Vec<R> = geometric_grid(lo_dec, hi_dec, 400, 50);
    let values: Vec<R> = grid.iter().map(|&x| f(x)).collect();

    let mut parts: Vec<(R, u8)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v == R::zero() {
            // Root sitting on a grid point; classify its multiplicity from φ'.
            let x = grid[i];
            let dscale = cst::<R>(1e-7)
                * (int::<R>(m * k) * x.powi(k as i32 - 1)
                    + (theta - R::one()) * weighted_power_sum(x, k - 1)
                    + R::one());
            let mult = if df(x).abs() <= dscale { 2 } else { 1 };
            parts.push((x, mult));
        }
    }
    for i in 0..grid.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == R::zero() || fb == R::zero() {
            continue;
        }
        if (fa > R::zero()) != (fb > R::zero()) {
            let br = Bracket { a: grid[i], b: grid[i + 1] };
            let x = bisect(f, br, tols.root_rel);
            let x = newton_polish(f, df, x, br.a, br.b, 12);
            parts.push((x, 1));
        }
    }

    let total: u32 = parts.iter().map(|&(_, mu)| u32::from(mu)).sum();
    if total == 0 {
        // φ is strictly positive on the grid. Its dip is unimodal, so refine
        // the sampled minimum and decide between "no roots", a tangential
        // double root, and a sub-grid pair of simple roots.
        let i_min = argmin(&values);
        let a = grid[i_min.saturating_sub(1)];
        let b = grid[(i_min + 1).min(grid.len() - 1)];
        let (xv, _) = golden_min(f, a, b, 1e-13);
        let xv = polish_stationary(df, d2f, xv, a, b);
        let fv = f(xv);
        let scale = double_root_scale(xv, m, q, k);
        if fv.abs() <= scale {
            parts.push((xv, 2));
        } else if fv < -scale {
            // Both crossings hid between grid points; bracket them around
            // the polished minimum.
            let x1 = bisect(f, Bracket { a, b: xv }, tols.root_rel);
            let x1 = newton_polish(f, df, x1, a, xv, 12);
            let x2 = bisect(f, Bracket { a: xv, b }, tols.root_rel);
            let x2 = newton_polish(f, df, x2, xv, b, 12);
            parts.push((x1, 1));
            parts.push((x2, 1));
        }
    } else if total == 1 {
        // The coefficient signs change twice, so an odd root count means the
        // partner hides next to the found root. Search the flanking cells.
        let r = parts[0].0;
        let idx = grid.partition_point(|&g| g < r);
        let a = grid[idx.saturating_sub(2)];
        let b = grid[(idx + 2).min(grid.len() - 1)];
        let mut found = false;
        for (lo, hi) in [(a, r), (r, b)] {
            if hi <= lo {
                continue;
            }
            let (xv, fv) = golden_min(f, lo, hi, 1e-13);
            let scale = double_root_scale(xv, m, q, k);
            if fv < -scale {
                // A strict dip: the partner crossing is on whichever side of
                // xv stays clear of the known root.
                let (ba, bb) = if (xv - r).abs() > (hi - lo) * cst(1e-3) && xv > r {
                    (xv, hi)
                } else {
                    (lo, xv)
                };
                let x = bisect(f, Bracket { a: ba, b: bb }, tols.root_rel);
                let x = newton_polish(f, df, x, ba, bb, 12);
                if (x - r).abs() > cst::<R>(1e-12) * r.abs() {
                    parts.push((x, 1));
                    found = true;
                    break;
                }
            }
        }
        if !found && parts[0].1 == 1 {
            return Err(PottsError::NumericalAnomaly(format!(
                "odd sign-change count around x = {r}: partner root not isolated \
                 (m = {m}, theta = {theta})"
            )));
        }
    }

    // The trivial root x = 1 exists only at θ = θ_c; elsewhere a near-1 value
    // is a genuine distinct root and gets one more polishing pass.
    let theta_c = params.theta_critical();
    let at_c = theta_close(theta, theta_c, tols.boundary_rel);
    for part in &mut parts {
        if (part.0 - R::one()).abs() <= cst::<R>(tol::TRIVIAL_ROOT_TOL) {
            if at_c {
                part.0 = R::one();
            } else {
                part.0 = newton_polish(f, df, part.0, part.0 - cst(1e-6), part.0 + cst(1e-6), 30);
            }
        }
    }

    RootSet::from_parts(parts)
}

fn argmin<R: Real>(values: &[R]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Closed-form root set for k = 2, where `φ_m(x) = m x² − (θ−1) x + (q−m)`.
///
/// Uses the cancellation-free evaluation: the larger root from the stable
/// quadratic formula, the smaller from the product x₁x₂ = (q−m)/m. The
/// tangency decision applies the same vertex-value test as [`solve_phi`].
pub fn solve_quadratic_k2<R: Real>(m: usize, q: usize, theta: R) -> Result<RootSet<R>> {
    if m < 1 || m >= q {
        return Err(PottsError::InvalidParameter(format!("m = {m} out of range 1..={}", q - 1)));
    }
    let mf = int::<R>(m);
    let b = theta - R::one();
    let c = int::<R>(q - m);
    let disc = b * b - cst::<R>(4.0) * mf * c;
    let xv = b / (cst::<R>(2.0) * mf);
    let vertex_value = -disc / (cst::<R>(4.0) * mf);
    let scale = double_root_scale(xv, m, q, 2);
    if vertex_value > scale {
        return Ok(RootSet::empty());
    }
    if vertex_value.abs() <= scale {
        return RootSet::from_parts(vec![(xv, 2)]);
    }
    let x2 = (b + disc.sqrt()) / (cst::<R>(2.0) * mf);
    let x1 = c / (mf * x2);
    RootSet::from_parts(vec![(x1, 1), (x2, 1)])
}

/// `ψ_m(x) = φ_m(x, θ_c)/(x − 1)
///         = m Σ_{i=0}^{k−1} x^i − (q/(k−1)) Σ_{i=0}^{k−2} (k−i−1) x^i`.
///
/// The cofactor of the trivial root at the critical transfer weight;
/// ψ_m(1) = 0 iff q = 2m.
pub fn psi_at_thetac<R: Real>(x: R, m: usize, params: &PottsParams<R>) -> Result<R> {
    check_m(m, params)?;
    let (q, k) = (params.q(), params.k());
    let geo = R::one() + power_sum(x, k - 1);
    let mut weighted = R::zero();
    let mut pow = R::one();
    for i in 0..=(k - 2) {
        weighted = weighted + int::<R>(k - i - 1) * pow;
        pow = pow * x;
    }
    Ok(int::<R>(m) * geo - int::<R>(q) / int::<R>(k - 1) * weighted)
}
