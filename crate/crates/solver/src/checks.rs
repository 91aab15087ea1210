//! Finite-difference and midpoint diagnostics for smooth terms.
//!
//! These helpers validate user-supplied [`SmoothFn`] implementations: the
//! analytic gradient against central differences, and convexity along a
//! segment via the midpoint inequality. They are used by the test suites and
//! may be called from application code when constructing new terms.

use nalgebra::DMatrix;

use crate::program::SmoothFn;

/// Maximum relative mismatch between the analytic gradient of `f` at `x` and
/// a central finite-difference estimate.
///
/// The mismatch for coordinate `i` is `|g_i - fd_i| / max(1, |fd_i|)`; the
/// largest over all coordinates is returned. Steps are scaled per coordinate
/// as `h_i = base_step * max(1, |x_i|)`.
pub fn check_gradient(f: &dyn SmoothFn, x: &[f64], base_step: f64) -> f64 {
    let n = x.len();
    let mut grad = vec![0.0; n];
    f.add_grad(x, 1.0, &mut grad);
    let mut xp = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..n {
        let h = base_step * x[i].abs().max(1.0);
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f.value(&xp);
        xp[i] = orig - h;
        let fm = f.value(&xp);
        xp[i] = orig;
        let fd = (fp - fm) / (2.0 * h);
        let err = (grad[i] - fd).abs() / fd.abs().max(1.0);
        worst = worst.max(err);
    }
    worst
}

/// Maximum relative mismatch between the analytic Hessian of `f` at `x` and a
/// central finite-difference estimate built from the analytic gradient.
pub fn check_hessian(f: &dyn SmoothFn, x: &[f64], base_step: f64) -> f64 {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    f.add_hess(x, 1.0, &mut hess);
    let mut xp = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..n {
        let h = base_step * x[i].abs().max(1.0);
        let orig = xp[i];
        let mut gp = vec![0.0; n];
        let mut gm = vec![0.0; n];
        xp[i] = orig + h;
        f.add_grad(&xp, 1.0, &mut gp);
        xp[i] = orig - h;
        f.add_grad(&xp, 1.0, &mut gm);
        xp[i] = orig;
        for j in 0..n {
            let fd = (gp[j] - gm[j]) / (2.0 * h);
            let err = (hess[(i, j)] - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(err);
        }
    }
    worst
}

/// Midpoint convexity defect of `f` between `x` and `y`:
/// `f((x+y)/2) - (f(x) + f(y)) / 2`.
///
/// Nonpositive (up to roundoff) for convex functions; a clearly positive
/// value certifies non-convexity along the segment.
pub fn check_convexity_midpoint(f: &dyn SmoothFn, x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "segment endpoints must share a dimension");
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    f.value(&mid) - 0.5 * (f.value(x) + f.value(y))
}
