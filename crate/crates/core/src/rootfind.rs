//! Bracketed one-dimensional root machinery shared by the fixed-point
//! polynomial and the critical-value equation: geometric sign-scan grids,
//! bisection, Newton polish, and a derivative-based tangency refiner.

use crate::scalar::{cst, int, Real};

/// A sign-change bracket [a, b] with f(a)·f(b) < 0.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bracket<R> {
    pub a: R,
    pub b: R,
}

/// Geometric grid over [10^lo_decade, 10^hi_decade], densified near x = 1.
///
/// `dense` points per decade inside [10^-2, 10^2], `sparse` outside. The
/// exponent grid passes through 0 exactly, so x = 1 is always a grid point.
pub(crate) fn geometric_grid<R: Real>(
    lo_decade: i32,
    hi_decade: i32,
    dense: usize,
    sparse: usize,
) -> Vec<R> {
    let mut exps: Vec<f64> = Vec::new();
    for dec in lo_decade..hi_decade {
        let density = if (-2..2).contains(&dec) { dense } else { sparse };
        for j in 0..density {
            exps.push(dec as f64 + j as f64 / density as f64);
        }
    }
    exps.push(hi_decade as f64);
    exps.into_iter().map(|e| cst::<R>(10.0f64).powf(cst(e))).collect()
}

/// Scans a grid for exact zeros and strict sign changes.
///
/// Exact zeros are returned separately and their cells are excluded from the
/// bracket list, so a root sitting on a grid point is not double-counted.
pub(crate) fn scan_grid<R: Real>(
    f: impl Fn(R) -> R,
    grid: &[R],
) -> (Vec<R>, Vec<Bracket<R>>) {
    let values: Vec<R> = grid.iter().map(|&x| f(x)).collect();
    let mut zeros = Vec::new();
    let mut brackets = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v == R::zero() {
            zeros.push(grid[i]);
        }
    }
    for i in 0..grid.len() - 1 {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == R::zero() || fb == R::zero() {
            continue;
        }
        if (fa > R::zero()) != (fb > R::zero()) {
            brackets.push(Bracket { a: grid[i], b: grid[i + 1] });
        }
    }
    (zeros, brackets)
}

/// Bisects a sign-change bracket down to the requested relative width.
pub(crate) fn bisect<R: Real>(f: impl Fn(R) -> R, bracket: Bracket<R>, rel_tol: f64) -> R {
    let tol = cst::<R>(rel_tol);
    let (mut a, mut b) = (bracket.a, bracket.b);
    let mut fa = f(a);
    if fa == R::zero() {
        return a;
    }
    // 200 halvings always suffice for f64 widths.
    for _ in 0..200 {
        let mid = (a + b) * cst(0.5);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == R::zero() {
            return mid;
        }
        if (fm > R::zero()) == (fa > R::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a) <= tol * a.abs().max(b.abs()) {
            break;
        }
    }
    (a + b) * cst(0.5)
}

/// Newton polish constrained to [lo, hi]; falls back to the input when the
/// derivative degenerates or the iteration leaves the interval.
pub(crate) fn newton_polish<R: Real>(
    f: impl Fn(R) -> R,
    df: impl Fn(R) -> R,
    x0: R,
    lo: R,
    hi: R,
    iters: usize,
) -> R {
    let mut x = x0;
    let mut best = x0;
    let mut best_val = f(x0).abs();
    for _ in 0..iters {
        let d = df(x);
        if d == R::zero() || !d.is_finite() {
            break;
        }
        let step = f(x) / d;
        let next = x - step;
        if !next.is_finite() || next < lo || next > hi {
            break;
        }
        x = next;
        let v = f(x).abs();
        if v < best_val {
            best_val = v;
            best = x;
        }
        if step.abs() <= cst::<R>(1e-16) * x.abs() {
            break;
        }
    }
    best
}

/// Golden-section minimization on [a, b] down to a relative x-width.
///
/// Returns (argmin, min) to the resolution the function values allow; flat
/// quadratic minima should be re-polished through their derivative.
pub(crate) fn golden_min<R: Real>(
    f: impl Fn(R) -> R,
    mut a: R,
    mut b: R,
    rel_tol: f64,
) -> (R, R) {
    let inv_phi = cst::<R>(0.618_033_988_749_894_9);
    let tol = cst::<R>(rel_tol);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) * cst(0.5);
    (mid, f(mid))
}

/// Polishes a tangency point (double root) as the simple zero of the
/// derivative, using Newton with the second derivative.
pub(crate) fn polish_stationary<R: Real>(
    df: impl Fn(R) -> R,
    d2f: impl Fn(R) -> R,
    x0: R,
    lo: R,
    hi: R,
) -> R {
    newton_polish(df, d2f, x0, lo, hi, 60)
}

/// Geometric-mean Horner sum x + x^2 + ... + x^n.
pub(crate) fn power_sum<R: Real>(x: R, n: usize) -> R {
    let mut acc = R::zero();
    for _ in 0..n {
        acc = (acc + R::one()) * x;
    }
    acc
}

/// Weighted sum Σ_{i=1}^{n} i · x^{i-1}.
pub(crate) fn weighted_power_sum<R: Real>(x: R, n: usize) -> R {
    let mut acc = R::zero();
    let mut pow = R::one();
    for i in 1..=n {
        acc = acc + int::<R>(i) * pow;
        pow = pow * x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_contains_one_exactly() {
        let grid: Vec<f64> = geometric_grid(-8, 8, 400, 50);
        assert!(grid.contains(&1.0));
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(grid[0], 1e-8, max_relative = 1e-12);
        assert_relative_eq!(*grid.last().unwrap(), 1e8, max_relative = 1e-12);
    }

    #[test]
    fn bisect_and_polish_find_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let df = |x: f64| 2.0 * x;
        let grid: Vec<f64> = geometric_grid(-8, 8, 400, 50);
        let (zeros, brackets) = scan_grid(f, &grid);
        assert!(zeros.is_empty());
        assert_eq!(brackets.len(), 1);
        let x = bisect(f, brackets[0], 1e-14);
        let x = newton_polish(f, df, x, brackets[0].a, brackets[0].b, 8);
        assert_relative_eq!(x, 2.0f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn scan_reports_exact_zero_once() {
        let f = |x: f64| x - 1.0; // zero exactly on the grid point x = 1
        let grid: Vec<f64> = geometric_grid(-2, 2, 100, 50);
        let (zeros, brackets) = scan_grid(f, &grid);
        assert_eq!(zeros, vec![1.0]);
        assert!(brackets.is_empty());
    }

    #[test]
    fn golden_min_locates_parabola_vertex() {
        let f = |x: f64| (x - 3.0) * (x - 3.0) + 0.25;
        let (x, v) = golden_min(f, 1.0, 10.0, 1e-14);
        assert_relative_eq!(x, 3.0, max_relative = 1e-6);
        assert_relative_eq!(v, 0.25, max_relative = 1e-12);
        let polished = polish_stationary(|x| 2.0 * (x - 3.0), |_| 2.0, x, 1.0, 10.0);
        assert_relative_eq!(polished, 3.0, max_relative = 1e-15);
    }

    #[test]
    fn power_sums() {
        assert_eq!(power_sum(2.0f64, 3), 2.0 + 4.0 + 8.0);
        assert_eq!(power_sum(1.0f64, 5), 5.0);
        assert_eq!(weighted_power_sum(2.0f64, 3), 1.0 + 2.0 * 2.0 + 3.0 * 4.0);
        assert_eq!(weighted_power_sum(1.0f64, 4), 10.0);
    }
}
