//! Error type for model evaluation.

use thiserror::Error;

/// Errors surfaced while validating scenarios or evaluating model quantities.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// A trajectory point entered an eavesdropper's uncertainty disc, where
    /// the worst-case wiretap distance is undefined.
    #[error(
        "trajectory point ({x:.3}, {y:.3}) lies inside the uncertainty disc of eavesdropper \
         {eve} (distance {dist:.3} m < radius {radius:.3} m)"
    )]
    EveExclusionViolated {
        eve: usize,
        x: f64,
        y: f64,
        dist: f64,
        radius: f64,
    },

    /// A worst-case ground-to-ground separation collapsed to (numerically)
    /// zero, so the path-loss term `A^-alpha` is unbounded.
    #[error(
        "degenerate worst-case ground distance {dist:.3e} m (<= {eps:.1e} m) between \
         eavesdropper {eve} and ground node {node}"
    )]
    DegenerateDistance {
        eve: usize,
        node: usize,
        dist: f64,
        eps: f64,
    },

    /// Trajectory / power-profile / scenario slot counts disagree.
    #[error(
        "slot-count mismatch: trajectory has {trajectory} points, power profile has {power}, \
         scenario expects {expected}"
    )]
    LengthMismatch {
        trajectory: usize,
        power: usize,
        expected: usize,
    },

    /// A scenario field violates a structural invariant.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
