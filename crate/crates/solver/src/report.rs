//! Solver options and result report.

use nalgebra::DVector;

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Duality-gap surrogate, KKT stationarity, and feasibility targets met.
    Converged,
    /// Outer barrier schedule or per-stage Newton budget exhausted.
    MaxIter,
    /// Phase-I certified that no strictly feasible point exists.
    Infeasible,
    /// A factorization collapsed or a non-finite value appeared.
    NumericalFailure,
}

/// Tunable solver parameters. The defaults are part of the numeric contract
/// and are what every optimizer in this workspace uses.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop the outer schedule once `m / t <= tol_gap`.
    pub tol_gap: f64,
    /// Max infinity-norm of the projected KKT stationarity residual for a
    /// `Converged` verdict.
    pub tol_kkt: f64,
    /// Max constraint residual for a `Converged` verdict.
    pub tol_feas: f64,
    /// Outer barrier multiplier `t <- mu_barrier * t`.
    pub mu_barrier: f64,
    /// Initial barrier weight.
    pub t0: f64,
    /// Damped-Newton iteration budget per barrier stage.
    pub max_newton_per_stage: usize,
    /// Outer stage budget.
    pub max_stages: usize,
    /// Armijo slope fraction.
    pub armijo_c: f64,
    /// Line-search backtracking factor.
    pub backtrack: f64,
    /// Max backtracking halvings per Newton step.
    pub max_backtracks: usize,
    /// Stage convergence threshold on the Newton decrement `lambda^2 / 2`.
    pub newton_tol: f64,
    /// Phase-I exits as soon as the slack drops below `-phase1_margin`.
    pub phase1_margin: f64,
    /// Smoothing epsilon for Euclidean norms in SOC constraints.
    pub smooth_eps: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_gap: 1e-6,
            tol_kkt: 1e-6,
            tol_feas: 1e-6,
            mu_barrier: 30.0,
            t0: 1.0,
            max_newton_per_stage: 200,
            max_stages: 60,
            armijo_c: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            newton_tol: 1e-9,
            phase1_margin: 1e-7,
            smooth_eps: 1e-3,
        }
    }
}

/// Result of a solve. `x_opt` is always populated with the best iterate,
/// even on failure statuses.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub x_opt: DVector<f64>,
    /// Objective value at `x_opt` (the maximized `f`).
    pub obj: f64,
    /// Worst signed constraint residual at `x_opt` (<= 0 means feasible);
    /// equalities contribute their absolute residual.
    pub max_violation: f64,
    /// Infinity norm of the projected KKT stationarity residual.
    pub kkt_residual: f64,
    /// Total damped-Newton iterations across all stages (including Phase-I).
    pub iterations: usize,
    pub status: Status,
    /// Objective value at the end of each completed barrier stage —
    /// nondecreasing along the central path.
    pub stage_objectives: Vec<f64>,
    /// Whether a Phase-I feasibility solve was needed.
    pub phase1_used: bool,
}
