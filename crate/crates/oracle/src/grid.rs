//! Exhaustive grid oracles for small instances.
//!
//! Two searches, both deliberately naive so they can certify the clever code:
//!
//! * [`grid_oracle_power`] enumerates the full power lattice of a short
//!   horizon against the *exact* clamped objective and exact constraints —
//!   the global optimum to grid resolution, no convexification anywhere.
//! * [`grid_oracle_trajectory`] scans single-slot waypoint moves on a local
//!   lattice, reporting the best exact-objective improvement that stays
//!   feasible. A sound optimizer output should leave nothing to find.

use crn_core::rates::{interference_bound_cached, pre_hinge_secrecy_rate_cached};
use crn_core::{ModelError, Point2, PowerProfile, Scenario, Trajectory};

/// Best grid point of the exhaustive power search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPower {
    pub power: PowerProfile,
    /// Exact worst-case average secrecy rate of [`Self::power`].
    pub wasr: f64,
}

/// Exhaustively maximize the exact clamped mean secrecy rate over a per-slot
/// power lattice (`points_per_slot` values from 0 to `p_max`), subject to the
/// exact interference and efficiency constraints.
///
/// Cost is `points_per_slot ^ n_slots`; the horizon is capped at four slots.
/// Returns `Ok(None)` when no lattice point is feasible (possible when the
/// jamming floor alone exceeds an interference limit).
pub fn grid_oracle_power(
    traj: &Trajectory,
    scen: &Scenario,
    points_per_slot: usize,
) -> Result<Option<GridPower>, ModelError> {
    let n = scen.n_slots;
    assert!(
        n <= 4,
        "exhaustive power search rejects horizons over 4 slots (got {n})"
    );
    assert!(points_per_slot >= 2, "need at least the two box endpoints");
    assert_eq!(traj.len(), n, "trajectory length mismatch");
    let cache = scen.build_cache()?;

    let g = points_per_slot;
    let levels: Vec<f64> = (0..g)
        .map(|i| scen.p_max * i as f64 / (g - 1) as f64)
        .collect();

    // Exact per-slot clamped rates and interference powers at every level.
    let mut rate = vec![vec![0.0; g]; n];
    let mut it = vec![vec![vec![0.0; g]; n]; scen.num_primaries()];
    for slot in 0..n {
        let q = traj.points[slot];
        for (i, &p) in levels.iter().enumerate() {
            rate[slot][i] = pre_hinge_secrecy_rate_cached(q, p, scen, &cache)?.max(0.0);
            for r in 0..scen.num_primaries() {
                it[r][slot][i] = interference_bound_cached(q, p, scen, &cache, r);
            }
        }
    }

    let mut search = Search {
        scen,
        levels: &levels,
        rate: &rate,
        it: &it,
        idx: vec![0; n],
        best_sum: f64::NEG_INFINITY,
        best_idx: None,
    };
    search.recurse(0, 0.0, 0.0, &mut vec![0.0; scen.num_primaries()]);

    Ok(search.best_idx.map(|idx| {
        let power = PowerProfile::new(idx.iter().map(|&i| levels[i]).collect());
        let wasr = idx
            .iter()
            .enumerate()
            .map(|(slot, &i)| rate[slot][i])
            .sum::<f64>()
            / n as f64;
        GridPower { power, wasr }
    }))
}

struct Search<'a> {
    scen: &'a Scenario,
    levels: &'a [f64],
    rate: &'a [Vec<f64>],
    it: &'a [Vec<Vec<f64>>],
    idx: Vec<usize>,
    best_sum: f64,
    best_idx: Option<Vec<usize>>,
}

impl Search<'_> {
    fn recurse(&mut self, depth: usize, rate_sum: f64, p_sum: f64, it_sum: &mut Vec<f64>) {
        let n = self.scen.n_slots;
        if depth == n {
            let nf = n as f64;
            for (r, &gamma) in self.scen.gamma_it.iter().enumerate() {
                // Tiny relative slack only absorbs accumulation noise; the
                // returned point is exact-feasible for all practical checks.
                if it_sum[r] / nf - gamma > 1e-12 * (1.0 + gamma) {
                    return;
                }
            }
            if self.scen.see_min > 0.0
                && p_sum > 0.0
                && rate_sum < self.scen.see_min * p_sum * (1.0 - 1e-12)
            {
                return;
            }
            if rate_sum > self.best_sum {
                self.best_sum = rate_sum;
                self.best_idx = Some(self.idx.clone());
            }
            return;
        }
        for i in 0..self.levels.len() {
            self.idx[depth] = i;
            for (r, row) in self.it.iter().enumerate() {
                it_sum[r] += row[depth][i];
            }
            self.recurse(
                depth + 1,
                rate_sum + self.rate[depth][i],
                p_sum + self.levels[i],
                it_sum,
            );
            for (r, row) in self.it.iter().enumerate() {
                it_sum[r] -= row[depth][i];
            }
        }
    }
}

/// The best single-slot lattice move found by [`grid_oracle_trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlotImprovement {
    /// Which waypoint to move.
    pub slot: usize,
    /// Where to move it.
    pub point: Point2,
    /// Exact worst-case average secrecy rate after the move.
    pub wasr: f64,
}

/// Scan every interior waypoint over a `points_per_axis`-squared lattice of
/// offsets within `half_extent` meters, keeping moves that respect the speed
/// limit to both neighbors, disc clearance, and the exact interference and
/// efficiency constraints. Returns the single best strict improvement of the
/// exact clamped mean secrecy rate, or `None` when no lattice move beats the
/// current trajectory.
pub fn grid_oracle_trajectory(
    traj: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
    half_extent: f64,
    points_per_axis: usize,
) -> Result<Option<SlotImprovement>, ModelError> {
    let n = scen.n_slots;
    assert_eq!(traj.len(), n, "trajectory length mismatch");
    assert_eq!(power.len(), n, "power length mismatch");
    assert!(points_per_axis >= 2, "need a nondegenerate lattice");
    let cache = scen.build_cache()?;

    // Base sums of the exact objective and constraints.
    let mut base_rate = Vec::with_capacity(n);
    let mut base_it = vec![0.0; scen.num_primaries()];
    let mut slot_it = vec![vec![0.0; scen.num_primaries()]; n];
    for slot in 0..n {
        let q = traj.points[slot];
        let p = power.watts[slot];
        base_rate.push(pre_hinge_secrecy_rate_cached(q, p, scen, &cache)?.max(0.0));
        for r in 0..scen.num_primaries() {
            let v = interference_bound_cached(q, p, scen, &cache, r);
            slot_it[slot][r] = v;
            base_it[r] += v;
        }
    }
    let base_sum: f64 = base_rate.iter().sum();
    let p_total = power.total();
    let nf = n as f64;
    let step = scen.v_max * scen.slot_len;

    let mut best: Option<SlotImprovement> = None;
    let mut best_sum = base_sum;
    let offsets: Vec<f64> = (0..points_per_axis)
        .map(|i| -half_extent + 2.0 * half_extent * i as f64 / (points_per_axis - 1) as f64)
        .collect();

    // Endpoints are pinned; only interior waypoints may move.
    for slot in 1..n.saturating_sub(1) {
        let q0 = traj.points[slot];
        let p = power.watts[slot];
        let prev = traj.points[slot - 1];
        let next = traj.points[slot + 1];
        for &dx in &offsets {
            for &dy in &offsets {
                let q = Point2::new(q0.x + dx, q0.y + dy);
                if prev.dist(q) > step || q.dist(next) > step {
                    continue;
                }
                if scen
                    .eves
                    .iter()
                    .any(|e| q.dist(e.pos_est) < e.radius + 1e-9)
                {
                    continue;
                }
                let new_rate = pre_hinge_secrecy_rate_cached(q, p, scen, &cache)?.max(0.0);
                let new_sum = base_sum - base_rate[slot] + new_rate;
                if new_sum <= best_sum {
                    continue;
                }
                let it_ok = (0..scen.num_primaries()).all(|r| {
                    let v = interference_bound_cached(q, p, scen, &cache, r);
                    (base_it[r] - slot_it[slot][r] + v) / nf <= scen.gamma_it[r]
                });
                if !it_ok {
                    continue;
                }
                if scen.see_min > 0.0 && p_total > 0.0 && new_sum < scen.see_min * p_total {
                    continue;
                }
                best_sum = new_sum;
                best = Some(SlotImprovement {
                    slot,
                    point: q,
                    wasr: new_sum / nf,
                });
            }
        }
    }
    Ok(best)
}
