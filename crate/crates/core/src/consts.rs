//! Numeric tolerances shared across the workspace.
//!
//! These are part of the model contract: audits, solvers, and tests all quote
//! the same constants so "feasible" means the same thing everywhere.

/// Distances below this (meters) are treated as degenerate when they appear
/// in a denominator (e.g. a worst-case ground separation of ~0 m).
pub const EPS_DIST: f64 = 1e-6;

/// Absolute tolerance (meters) for trajectory endpoint equality checks.
pub const TOL_EQ: f64 = 1e-6;

/// Feasibility tolerance for constraint residuals. Geometric and power
/// residuals use it absolutely (meters / Watts); interference-temperature and
/// secrecy-energy-efficiency residuals use it relative to `1 + threshold`.
pub const TOL_FEAS: f64 = 1e-6;

/// Relative tolerance for pure-arithmetic identities (unit conversions,
/// cached-vs-recomputed cross-checks).
pub const TOL_NUM: f64 = 1e-9;
