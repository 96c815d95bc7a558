//! Critical transfer weights θ_m and critical temperatures T_{c,m}.
//!
//! For each block size m the fixed-point polynomial φ_m acquires its
//! tangential root at a unique θ_m. The tangency location x_*(m) is the
//! unique positive root of
//!
//! ```text
//! m Σ_{i=1}^{k−1} i x^{2k−i−1} − (q−m) Σ_{i=1}^{k−1} i x^{i−1} = 0 ,
//! ```
//!
//! and θ_m = 1 + (m x_*^k + q − m)/(x_* + x_*² + … + x_*^{k−1}). For k = 2
//! this closes to θ_m = 1 + 2√(m(q−m)).

use crate::error::{PottsError, Result};
use crate::model::{theta_close, PottsParams};
use crate::rootfind::{bisect, geometric_grid, newton_polish, power_sum, scan_grid, weighted_power_sum};
use crate::scalar::{cst, int, Real};
use crate::tol::{self, Tolerances};

/// Critical data for one block size m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint<R> {
    /// Block size.
    pub m: usize,
    /// Tangency root of φ_m; \> 1 for m < q/2 and exactly 1 when q = 2m.
    pub x_star: R,
    /// Critical transfer weight; ≤ θ_c with equality iff q = 2m.
    pub theta_m: R,
    /// Critical temperature J / ln θ_m.
    pub t_cm: R,
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

/// Left-hand side of the tangency equation.
fn tangency_poly<R: Real>(x: R, m: usize, q: usize, k: usize) -> R {
    let mut high = R::zero();
    for i in 1..k {
        high = high + int::<R>(i) * x.powi((2 * k - i - 1) as i32);
    }
    int::<R>(m) * high - int::<R>(q - m) * weighted_power_sum(x, k - 1)
}

fn tangency_poly_deriv<R: Real>(x: R, m: usize, q: usize, k: usize) -> R {
    let mut high = R::zero();
    for i in 1..k {
        high = high + int::<R>(i * (2 * k - i - 1)) * x.powi((2 * k - i - 2) as i32);
    }
    let mut low = R::zero();
    for i in 2..k {
        low = low + int::<R>(i * (i - 1)) * x.powi((i - 2) as i32);
    }
    int::<R>(m) * high - int::<R>(q - m) * low
}

/// The unique positive root of the tangency equation for block size m.
///
/// The polynomial has exactly one coefficient sign change, so exactly one
/// positive root; the solver asserts that exactly one bracket is found and
/// reports anything else as a numerical anomaly.
pub fn x_star<R: Real>(m: usize, params: &PottsParams<R>) -> Result<R> {
    check_m(m, params)?;
    let (q, k) = (params.q(), params.k());
    let f = |x: R| tangency_poly(x, m, q, k);
    let df = |x: R| tangency_poly_deriv(x, m, q, k);
    let grid: Vec<R> = geometric_grid(-8, 8, 400, 50);
    let (zeros, brackets) = scan_grid(f, &grid);
    match (zeros.len(), brackets.len()) {
        (1, 0) => Ok(zeros[0]),
        (0, 1) => {
            let x = bisect(f, brackets[0], tol::X_STAR_REL);
            Ok(newton_polish(f, df, x, brackets[0].a, brackets[0].b, 12))
        }
        (nz, nb) => Err(PottsError::NumericalAnomaly(format!(
            "tangency equation for m = {m} (q = {q}, k = {k}) produced {nz} grid zeros and \
             {nb} brackets; expected exactly one root"
        ))),
    }
}

/// θ_m = 1 + (m x_*^k + q − m)/(x_* + … + x_*^{k−1}).
pub fn theta_m<R: Real>(m: usize, params: &PottsParams<R>) -> Result<R> {
    let xs = x_star(m, params)?;
    Ok(theta_at_tangency(xs, m, params))
}

fn theta_at_tangency<R: Real>(x: R, m: usize, params: &PottsParams<R>) -> R {
    let (q, k) = (params.q(), params.k());
    R::one() + (int::<R>(m) * x.powi(k as i32) + int::<R>(q - m)) / power_sum(x, k - 1)
}

/// Closed form for k = 2: θ_m = 1 + 2√(m(q−m)).
pub fn theta_m_closed_k2<R: Real>(m: usize, q: usize) -> Result<R> {
    if m < 1 || m >= q {
        return Err(PottsError::InvalidParameter(format!("m = {m} out of range 1..={}", q - 1)));
    }
    Ok(R::one() + cst::<R>(2.0) * int::<R>(m * (q - m)).sqrt())
}

/// All critical points for m = 1, …, ⌊q/2⌋, sorted by m, with the ordering
/// θ_1 < θ_2 < … < θ_{⌊q/2⌋} ≤ θ_c asserted (equality iff q even).
pub fn critical_temperatures<R: Real>(params: &PottsParams<R>) -> Result<Vec<CriticalPoint<R>>> {
    let q = params.q();
    let coupling = params.coupling();
    let mut points = Vec::with_capacity(q / 2);
    for m in 1..=q / 2 {
        let xs = x_star(m, params)?;
        let tm = theta_at_tangency(xs, m, params);
        points.push(CriticalPoint { m, x_star: xs, theta_m: tm, t_cm: coupling / tm.ln() });
    }
    assert_ordering(&points, params)?;
    Ok(points)
}

fn assert_ordering<R: Real>(points: &[CriticalPoint<R>], params: &PottsParams<R>) -> Result<()> {
    let q = params.q();
    let theta_c = params.theta_critical();
    for w in points.windows(2) {
        if !(w[0].theta_m < w[1].theta_m) {
            return Err(PottsError::NumericalAnomaly(format!(
                "critical weights out of order: theta_{} = {} !< theta_{} = {}",
                w[0].m, w[0].theta_m, w[1].m, w[1].theta_m
            )));
        }
        if !(w[0].t_cm > w[1].t_cm) {
            return Err(PottsError::NumericalAnomaly(format!(
                "critical temperatures not strictly decreasing at m = {}",
                w[1].m
            )));
        }
    }
    if let Some(last) = points.last() {
        let equal = theta_close(last.theta_m, theta_c, tol::THETA_BOUNDARY_REL);
        if q.is_multiple_of(2) {
            if !equal {
                return Err(PottsError::NumericalAnomaly(format!(
                    "even q = {q}: theta_{} = {} must equal theta_c = {theta_c}",
                    last.m, last.theta_m
                )));
            }
        } else if !(last.theta_m < theta_c) {
            return Err(PottsError::NumericalAnomaly(format!(
                "odd q = {q}: theta_{} = {} must stay below theta_c = {theta_c}",
                last.m, last.theta_m
            )));
        }
    }
    Ok(())
}

/// Warnings for manual review; currently the odd-q coincidence of the top
/// critical weight with θ_c, which the counting rules only expect for even q.
pub fn coincidence_warnings<R: Real>(
    points: &[CriticalPoint<R>],
    params: &PottsParams<R>,
) -> Vec<String> {
    let mut warnings = Vec::new();
    if params.q() % 2 == 1 {
        if let Some(last) = points.last() {
            if theta_close(last.theta_m, params.theta_critical(), tol::THETA_BOUNDARY_REL) {
                warnings.push(format!(
                    "odd q = {}: theta_{} coincides with theta_c within tolerance; \
                     counts near this point need manual review",
                    params.q(),
                    last.m
                ));
            }
        }
    }
    warnings
}

/// Block size as a function of the tangency location:
/// `ξ(x) = q Σ i x^{i−1} / Σ i (x^{i−1} + x^{2k−i−1})`; ξ(1) = q/2 and ξ is
/// strictly decreasing, so x_*(m) = ξ⁻¹(m) decreases in m.
pub fn xi<R: Real>(x: R, q: usize, k: usize) -> R {
    let low = weighted_power_sum(x, k - 1);
    let mut mirrored = R::zero();
    for i in 1..k {
        mirrored = mirrored + int::<R>(i) * x.powi((2 * k - i - 1) as i32);
    }
    int::<R>(q) * low / (low + mirrored)
}

/// Critical weight as a function of the tangency location:
/// `η(x) = 1 + (ξ(x)(x^k − 1) + q) / (x + … + x^{k−1})`; η(1) = θ_c and η
/// decreases for x > 1, which yields the ordering of the θ_m.
pub fn eta<R: Real>(x: R, q: usize, k: usize) -> R {
    R::one() + (xi(x, q, k) * (x.powi(k as i32) - R::one()) + int::<R>(q)) / power_sum(x, k - 1)
}

/// [`theta_m`] with explicit root tolerances (the boundary tolerance is not
/// used here; the argument keeps the CLI plumbing uniform).
pub fn theta_m_with<R: Real>(m: usize, params: &PottsParams<R>, _tols: &Tolerances) -> Result<R> {
    theta_m(m, params)
}
