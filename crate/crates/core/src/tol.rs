//! Tolerances used across the crate, named and centralized.
//!
//! Values are quoted for `f64`; generic code converts them at the use site.

/// Relative tolerance deciding whether θ sits exactly on a critical value
/// (θ_c or some θ_m). The measure count changes *at* these points, so the
/// boundary must be detectable.
pub const THETA_BOUNDARY_REL: f64 = 1e-12;

/// Relative width target for bisection brackets.
pub const ROOT_BISECT_REL: f64 = 1e-14;

/// Relative accuracy target for the tangency root of the critical-value
/// equation.
pub const X_STAR_REL: f64 = 1e-13;

/// Coefficient of the double-root acceptance test: a tangential root is
/// reported when the polynomial minimum is within `DOUBLE_ROOT_COEFF * (m*x^k + q)`
/// of zero.
pub const DOUBLE_ROOT_COEFF: f64 = 1e-8;

/// Roots closer to 1 than this are the trivial root, admissible only at θ_c.
pub const TRIVIAL_ROOT_TOL: f64 = 1e-9;

/// A boundary law is accepted as a fixed point when its componentwise
/// residual does not exceed this.
pub const FIXED_POINT_RESIDUAL: f64 = 1e-9;

/// Multi-start solutions closer than this (mixed absolute/relative) are one
/// cluster.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Residual target declared by the multi-start Newton polish.
pub const SOLVER_CONVERGENCE: f64 = 1e-12;

/// Compatibility residual bound for exact fixed points.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// Exhaustive finite-volume distributions must sum to 1 within this.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Feasibility threshold of the convex-hull membership program.
pub const HULL_FEASIBILITY_TOL: f64 = 1e-9;

/// z* values are considered equal under this relative tolerance ...
pub const ZSTAR_EQ_REL: f64 = 1e-9;
/// ... with this absolute floor.
pub const ZSTAR_EQ_ABS: f64 = 1e-12;

/// Round-trip slack for h = ln z.
pub const LOG_ROUND_TRIP_REL: f64 = 1e-14;

/// Full exhaustive sums are refused above this many configurations.
pub const GUARD_FULL_CONFIGS: u128 = 100_000_000;

/// Boundary-only sums are refused above this many boundary configurations.
pub const GUARD_BOUNDARY_CONFIGS: u128 = 1_000_000;

/// Overridable tolerances threaded from the CLI into classification and
/// root finding.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative bisection/polish target for polynomial roots.
    pub root_rel: f64,
    /// Relative θ-boundary comparison tolerance.
    pub boundary_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_rel: ROOT_BISECT_REL,
            boundary_rel: THETA_BOUNDARY_REL,
        }
    }
}
