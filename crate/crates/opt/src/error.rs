//! Optimizer-level failure modes.

use crn_core::ModelError;
use crn_solver::Status;
use thiserror::Error;

/// Why a subproblem or the alternating driver could not produce an iterate.
#[derive(Debug, Error)]
pub enum OptError {
    /// The underlying network model rejected the configuration.
    #[error(transparent)]
    Model(#[from] ModelError),

    /// Jamming alone already exceeds the interference-temperature limit at a
    /// primary receiver, so no transmit power profile can be admissible.
    #[error(
        "worst-case jamming floor {floor:.3e} W exceeds the interference limit \
         {limit:.3e} W at primary receiver {primary}; no power profile is admissible"
    )]
    InterferenceInfeasible {
        primary: usize,
        floor: f64,
        limit: f64,
    },

    /// The convexified power subproblem did not return a usable iterate.
    #[error("power subproblem failed with solver status {status:?}")]
    PowerSolveFailed { status: Status },

    /// The convexified trajectory subproblem did not return a usable iterate.
    #[error("trajectory subproblem failed with solver status {status:?}")]
    TrajectorySolveFailed { status: Status },

    /// No feasible starting point could be constructed for the scenario.
    #[error("no feasible starting point: {0}")]
    StartInfeasible(String),
}
