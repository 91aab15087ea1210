//! Secrecy-rate maximization for the UAV relay: convexified per-slot power
//! and planar trajectory subproblems, alternated until the exact hinged
//! objective stops improving.
//!
//! Both subproblems replace the nonconvex secrecy objective with a concave
//! minorant built at the current iterate — tight there, a lower bound
//! everywhere — so each accepted block update is a certified improvement of
//! the true objective, not just of a model. The driver in [`bcd`] enforces
//! this by re-scoring every candidate with the exact evaluator and keeping
//! it only when the audited objective does not regress.

pub mod bcd;
pub mod error;
pub mod power;
pub mod trajectory;

pub use bcd::{
    initialize, optimize, optimize_from, run_benchmark, sweep_it_threshold, BcdIteration,
    BcdOptions, BcdRun, BcdTrace, Benchmark, Scheme, StopReason, SweepCurves,
};
pub use error::OptError;
pub use power::{
    build_power_coeffs, power_program, solve_power, PowerCoeffs, PowerOutcome, PowerProgram,
    PowerSurrogate,
};
pub use trajectory::{
    solve_trajectory, surrogate_secrecy_mean, trajectory_program, TrajectoryOutcome,
    TrajectoryProgram,
};
