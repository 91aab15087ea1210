//! Whole-solution scoring.

use crate::error::ModelError;
use crate::rates::{eve_rate, interference_bound_cached, legit_rate_lb_cached};
use crate::types::{PowerProfile, Scenario, Trajectory};

/// Everything the model says about one time slot of a candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDiagnostics {
    /// Legitimate-rate lower bound, bits/s/Hz.
    pub legit_rate: f64,
    /// Worst-case colluding eavesdropping rate, bits/s/Hz.
    pub eve_rate: f64,
    /// `legit_rate - eve_rate` before the hinge.
    pub pre_hinge: f64,
    /// Worst-case secrecy rate `[pre_hinge]^+`, bits/s/Hz.
    pub secrecy_rate: f64,
    /// Per-primary worst-case interference powers, Watts.
    pub interference: Vec<f64>,
}

/// A scored (trajectory, power) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub power: PowerProfile,
    pub per_slot: Vec<SlotDiagnostics>,
    /// Worst-case average secrecy rate `(1/N) * sum_n secrecy_rate(n)`.
    pub wasr: f64,
    /// Secrecy energy efficiency `sum_n secrecy / sum_n power`, bits/Joule
    /// per unit bandwidth. `None` when total power is zero: the ratio is
    /// undefined and the efficiency constraint is vacuously satisfied (no
    /// energy was spent and nothing leaked).
    pub see: Option<f64>,
}

/// Score a (trajectory, power) pair against a scenario: per-slot rates and
/// interference, the worst-case average secrecy rate, and the secrecy energy
/// efficiency.
///
/// The pair does not need to satisfy the motion/power constraints — use
/// [`crate::audit::audit_solution`] for that — but every point must stay out
/// of the eavesdropper uncertainty discs or scoring is impossible.
pub fn evaluate_solution(
    trajectory: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
) -> Result<Solution, ModelError> {
    if trajectory.len() != scen.n_slots || power.len() != scen.n_slots {
        return Err(ModelError::LengthMismatch {
            trajectory: trajectory.len(),
            power: power.len(),
            expected: scen.n_slots,
        });
    }
    let cache = scen.build_cache()?;
    let mut per_slot = Vec::with_capacity(scen.n_slots);
    let mut rate_sum = 0.0;
    for (&q, &p) in trajectory.points.iter().zip(&power.watts) {
        let legit = legit_rate_lb_cached(q, p, scen, &cache);
        let eve = eve_rate(q, p, scen)?;
        let pre = legit - eve;
        let sec = pre.max(0.0);
        let interference = (0..scen.num_primaries())
            .map(|r| interference_bound_cached(q, p, scen, &cache, r))
            .collect();
        rate_sum += sec;
        per_slot.push(SlotDiagnostics {
            legit_rate: legit,
            eve_rate: eve,
            pre_hinge: pre,
            secrecy_rate: sec,
            interference,
        });
    }
    let total_power = power.total();
    let see = if total_power > 0.0 {
        Some(rate_sum / total_power)
    } else {
        None
    };
    Ok(Solution {
        trajectory: trajectory.clone(),
        power: power.clone(),
        per_slot,
        wasr: rate_sum / scen.n_slots as f64,
        see,
    })
}
