//! A deterministic log-barrier interior-point solver for smooth convex
//! programs of the form
//!
//! ```text
//! maximize     f(x)                     (f concave, twice differentiable)
//! subject to   g_i(x) <= 0              (g_i convex, twice differentiable)
//!              ||A_j x + b_j|| <= c_j' x + d_j
//!              lo <= x <= up            (entrywise, +-inf allowed)
//!              E x = h                  (linear equalities)
//! ```
//!
//! Functions are supplied as [`SmoothFn`] callbacks (value, gradient,
//! Hessian accumulation, optional sparsity support). The solver runs the
//! classic two-phase barrier method: a Phase-I feasibility program when the
//! start point violates an inequality, then damped Newton with Armijo
//! backtracking on `t*(-f) - sum ln(-g_i)` along an outer schedule
//! `t <- mu * t` until the duality-gap surrogate `m/t` is below tolerance.
//! Equalities are maintained exactly via the KKT system of each Newton step.
//!
//! There is no randomness anywhere: identical inputs produce bitwise
//! identical outputs.

pub mod barrier;
pub mod checks;
pub mod program;
pub mod report;

pub use barrier::solve;
pub use checks::{check_convexity_midpoint, check_gradient, check_hessian};
pub use program::{ConvexProgram, LinearEquality, LinearFn, SmoothFn, SocConstraint};
pub use report::{SolveOptions, SolverReport, Status};
