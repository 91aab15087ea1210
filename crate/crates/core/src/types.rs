//! Core data types: radio constants, scenario, trajectory, power profile.

use crate::consts::EPS_DIST;
use crate::error::ModelError;
use crate::geometry::Point2;

/// Physical-layer constants shared by every link in the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConstants {
    /// Channel power gain at 1 m reference distance (dimensionless, linear).
    pub beta0: f64,
    /// Noise power at every receiver, Watts (W/Hz under unit bandwidth).
    pub sigma2: f64,
    /// Ground-to-ground path-loss exponent.
    pub alpha: f64,
    /// Per-eavesdropper full-duplex jamming power, Watts. Zero disables
    /// jamming (pure wiretapping).
    pub pe: f64,
}

impl RadioConstants {
    /// Reference SNR `beta0 / sigma2`. Always recomputed from its parts so it
    /// can never drift out of sync with them.
    pub fn rho0(&self) -> f64 {
        self.beta0 / self.sigma2
    }
}

/// An eavesdropper whose true position is known only to lie within a disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveEstimate {
    /// Estimated ground position (disc center), meters.
    pub pos_est: Point2,
    /// Uncertainty radius, meters (>= 0).
    pub radius: f64,
}

/// A complete problem instance: node geometry, UAV kinematics, radio
/// constants, and the constraint thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Legitimate user positions `w_Dk`, meters.
    pub users: Vec<Point2>,
    /// Primary receiver positions `w_Ur`, meters (may be empty).
    pub primaries: Vec<Point2>,
    /// Eavesdropper estimates `(w_hat_Em, r_Em)`.
    pub eves: Vec<EveEstimate>,
    /// UAV flight altitude `H`, meters (> 0).
    pub altitude: f64,
    /// Start of the flight path, meters.
    pub q_start: Point2,
    /// End of the flight path, meters.
    pub q_end: Point2,
    /// Number of time slots `N` (>= 1).
    pub n_slots: usize,
    /// Slot duration, seconds (> 0).
    pub slot_len: f64,
    /// Maximum horizontal speed, m/s (> 0).
    pub v_max: f64,
    /// Maximum per-slot transmit power, Watts (> 0).
    pub p_max: f64,
    /// Per-primary interference-temperature thresholds, Watts (one per
    /// primary, each > 0).
    pub gamma_it: Vec<f64>,
    /// Required secrecy energy efficiency `Psi`, bits/Joule (per unit
    /// bandwidth). Values <= 0 make the constraint vacuous.
    pub see_min: f64,
    /// Shared radio constants.
    pub radio: RadioConstants,
}

impl Scenario {
    /// Number of legitimate users `K`.
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// Number of eavesdroppers `M`.
    pub fn num_eves(&self) -> usize {
        self.eves.len()
    }

    /// Number of primary receivers `R`.
    pub fn num_primaries(&self) -> usize {
        self.primaries.len()
    }

    /// Check every structural invariant, returning the first violation.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |msg: String| Err(ModelError::InvalidScenario(msg));
        if self.users.is_empty() {
            return fail("at least one legitimate user is required".into());
        }
        if self.eves.is_empty() {
            return fail("at least one eavesdropper is required".into());
        }
        if !(self.altitude > 0.0) {
            return fail(format!("altitude must be > 0 m, got {}", self.altitude));
        }
        if self.n_slots == 0 {
            return fail("horizon must contain at least one slot".into());
        }
        if !(self.slot_len > 0.0) {
            return fail(format!("slot length must be > 0 s, got {}", self.slot_len));
        }
        if !(self.v_max > 0.0) {
            return fail(format!("v_max must be > 0 m/s, got {}", self.v_max));
        }
        if !(self.p_max > 0.0) {
            return fail(format!("p_max must be > 0 W, got {}", self.p_max));
        }
        if self.gamma_it.len() != self.primaries.len() {
            return fail(format!(
                "gamma_it has {} entries but there are {} primaries",
                self.gamma_it.len(),
                self.primaries.len()
            ));
        }
        for (r, &g) in self.gamma_it.iter().enumerate() {
            if !(g > 0.0) || !g.is_finite() {
                return fail(format!("gamma_it[{r}] must be finite and > 0 W, got {g}"));
            }
        }
        for (m, eve) in self.eves.iter().enumerate() {
            if eve.radius < 0.0 {
                return fail(format!("eavesdropper {m} has negative radius"));
            }
        }
        if !(self.radio.beta0 > 0.0) {
            return fail(format!("beta0 must be > 0, got {}", self.radio.beta0));
        }
        if !(self.radio.sigma2 > 0.0) {
            return fail(format!("sigma2 must be > 0 W, got {}", self.radio.sigma2));
        }
        if !(self.radio.alpha > 0.0) {
            return fail(format!("alpha must be > 0, got {}", self.radio.alpha));
        }
        if self.radio.pe < 0.0 {
            return fail(format!("pe must be >= 0 W, got {}", self.radio.pe));
        }
        if !self.see_min.is_finite() {
            return fail(format!("see_min must be finite, got {}", self.see_min));
        }
        // Endpoints must be reachable within the horizon.
        let reach = (self.n_slots.max(1) - 1) as f64 * self.v_max * self.slot_len;
        let needed = self.q_start.dist(self.q_end);
        if needed > reach + EPS_DIST {
            return fail(format!(
                "endpoints are {needed:.3} m apart but at most {reach:.3} m are reachable \
                 in {} slots",
                self.n_slots
            ));
        }
        Ok(())
    }

    /// Precompute the per-scenario constants used by rate and interference
    /// evaluation. Fails on degenerate worst-case ground distances.
    pub fn build_cache(&self) -> Result<ScenarioCache, ModelError> {
        let radio = &self.radio;
        // Worst-case jamming floor in each user's decoding SINR:
        //   sigma^2 + pe * beta0 * sum_m A_{k,m}^(-alpha),
        // with A_{k,m} the closest the eavesdropper can be to user k.
        // With jamming disabled the ground-to-ground links drop out of the
        // model entirely, so their (possibly degenerate) worst-case
        // separations are never probed.
        let jamming = radio.pe > 0.0;
        let mut g2g_denom = Vec::with_capacity(self.users.len());
        for (k, &w) in self.users.iter().enumerate() {
            let mut jam = 0.0;
            if jamming {
                for (m, eve) in self.eves.iter().enumerate() {
                    jam +=
                        radio.pe * crate::channel::worst_case_g2g_gain_coeff(w, eve, radio, m, k)?;
                }
            }
            g2g_denom.push(radio.sigma2 + jam);
        }
        // Constant jamming seen by each primary receiver (UAV-independent).
        let mut jam_const = Vec::with_capacity(self.primaries.len());
        for (r, &w) in self.primaries.iter().enumerate() {
            let mut jam = 0.0;
            if jamming {
                for (m, eve) in self.eves.iter().enumerate() {
                    jam +=
                        radio.pe * crate::channel::worst_case_g2g_gain_coeff(w, eve, radio, m, r)?;
                }
            }
            jam_const.push(jam);
        }
        Ok(ScenarioCache {
            g2g_denom,
            jam_const,
        })
    }
}

/// Memoized per-scenario constants. Built once via [`Scenario::build_cache`]
/// and shared immutably afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCache {
    /// Per user `k`: `sigma^2 + pe * beta0 * sum_m A_{k,m}^(-alpha)` (Watts).
    pub g2g_denom: Vec<f64>,
    /// Per primary `r`: `pe * sum_m beta0 * A_{r,m}^(-alpha)` (Watts).
    pub jam_const: Vec<f64>,
}

/// A discretized flight path: one ground-projected waypoint per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Point2>,
}

impl Trajectory {
    pub fn new(points: Vec<Point2>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The straight line from `q_start` to `q_end` sampled at `n` points
    /// (both endpoints included; a single-slot horizon sits at the start).
    pub fn straight_line(q_start: Point2, q_end: Point2, n: usize) -> Self {
        let mut points = Vec::with_capacity(n);
        if n == 1 {
            points.push(q_start);
        } else {
            for i in 0..n {
                let t = i as f64 / (n - 1) as f64;
                points.push(q_start + (q_end - q_start) * t);
            }
        }
        Self { points }
    }
}

/// Per-slot transmit powers, Watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    pub watts: Vec<f64>,
}

impl PowerProfile {
    pub fn new(watts: Vec<f64>) -> Self {
        Self { watts }
    }

    pub fn uniform(p: f64, n: usize) -> Self {
        Self {
            watts: vec![p; n],
        }
    }

    pub fn len(&self) -> usize {
        self.watts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.watts.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.watts.iter().sum()
    }
}
