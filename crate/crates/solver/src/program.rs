//! Problem description types.

use nalgebra::DMatrix;

/// A twice-differentiable scalar function of the decision vector.
///
/// Implementations provide the value, accumulate `w * gradient` and
/// `w * Hessian` into caller-owned buffers, and may declare the variable
/// indices they actually touch so the solver can exploit sparsity when
/// forming barrier Hessians. Gradient and Hessian must be consistent with
/// the value to first/second order — `checks::check_gradient` verifies the
/// former against central finite differences.
pub trait SmoothFn {
    /// `f(x)`.
    fn value(&self, x: &[f64]) -> f64;

    /// `grad += w * df/dx`.
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]);

    /// `hess += w * d2f/dx2`.
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>);

    /// Indices of the variables this function depends on, if sparse.
    /// `None` means "potentially all of them".
    fn support(&self) -> Option<&[usize]> {
        None
    }
}

/// An affine function `coeffs' x + constant`, usable as an objective term or
/// an inequality `coeffs' x + constant <= 0`.
#[derive(Debug, Clone)]
pub struct LinearFn {
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
    support: Vec<usize>,
}

impl LinearFn {
    pub fn new(coeffs: Vec<(usize, f64)>, constant: f64) -> Self {
        let mut support: Vec<usize> = coeffs.iter().map(|&(i, _)| i).collect();
        support.sort_unstable();
        support.dedup();
        Self {
            coeffs,
            constant,
            support,
        }
    }
}

impl SmoothFn for LinearFn {
    fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.constant;
        for &(i, c) in &self.coeffs {
            v += c * x[i];
        }
        v
    }

    fn add_grad(&self, _x: &[f64], w: f64, grad: &mut [f64]) {
        for &(i, c) in &self.coeffs {
            grad[i] += w * c;
        }
    }

    fn add_hess(&self, _x: &[f64], _w: f64, _hess: &mut DMatrix<f64>) {}

    fn support(&self) -> Option<&[usize]> {
        Some(&self.support)
    }
}

/// Second-order-cone constraint `||A x + b|| <= c' x + d`, with rows of `A x
/// + b` given sparsely. `scale` divides the smoothed residual so constraints
/// of very different physical magnitudes condition the barrier equally.
///
/// When `c` is empty the constraint is handled exactly in squared form
/// `||A x + b||^2 <= d^2`; otherwise the Euclidean norm is smoothed as
/// `sqrt(||A x + b||^2 + eps^2)` with the solver-level `smooth_eps`.
#[derive(Debug, Clone)]
pub struct SocConstraint {
    /// Each row: (sparse coefficients, offset) -> one component of `A x + b`.
    pub rows: Vec<(Vec<(usize, f64)>, f64)>,
    /// Sparse coefficients of the affine bound side.
    pub c: Vec<(usize, f64)>,
    pub d: f64,
    pub scale: f64,
}

impl SocConstraint {
    /// `||q_i - q_j|| <= bound` for 2-D points stored at coordinate indices
    /// `(ix, iy)` and `(jx, jy)` — the discrete speed-limit constraint.
    pub fn point_distance(ix: usize, iy: usize, jx: usize, jy: usize, bound: f64) -> Self {
        Self {
            rows: vec![
                (vec![(ix, 1.0), (jx, -1.0)], 0.0),
                (vec![(iy, 1.0), (jy, -1.0)], 0.0),
            ],
            c: Vec::new(),
            d: bound,
            scale: bound * bound,
        }
    }
}

/// Linear equality `coeffs' x = rhs`.
#[derive(Debug, Clone)]
pub struct LinearEquality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearEquality {
    /// Pin a single coordinate: `x[i] = value`.
    pub fn pin(i: usize, value: f64) -> Self {
        Self {
            coeffs: vec![(i, 1.0)],
            rhs: value,
        }
    }
}

/// A complete convex program. The objective is **maximized**.
pub struct ConvexProgram {
    pub dim: usize,
    pub objective: Box<dyn SmoothFn>,
    /// Convex inequality constraints `g_i(x) <= 0`.
    pub inequalities: Vec<Box<dyn SmoothFn>>,
    /// Entrywise bounds; use `f64::NEG_INFINITY` / `f64::INFINITY` to skip.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub soc: Vec<SocConstraint>,
    pub equalities: Vec<LinearEquality>,
}

impl ConvexProgram {
    /// A program over `dim` variables with the given objective and no
    /// constraints; callers then push constraints as needed.
    pub fn new(dim: usize, objective: Box<dyn SmoothFn>) -> Self {
        Self {
            dim,
            objective,
            inequalities: Vec::new(),
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
            soc: Vec::new(),
            equalities: Vec::new(),
        }
    }

    /// Number of inequality-type barrier terms (smooth + SOC + finite
    /// bounds); this scales the duality-gap surrogate `m / t`.
    pub fn num_barrier_terms(&self) -> usize {
        let finite_bounds = self
            .lower
            .iter()
            .filter(|l| l.is_finite())
            .count()
            + self.upper.iter().filter(|u| u.is_finite()).count();
        self.inequalities.len() + self.soc.len() + finite_bounds
    }
}
