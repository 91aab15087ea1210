//! The 2-D trajectory subproblem at a fixed power profile.
//!
//! With power frozen, the per-slot secrecy rate depends on the UAV position
//! through squared distances to users (legitimate side) and worst-case
//! effective distances to eavesdropper discs (leakage side). Both enter
//! non-concavely, so each round convexifies around the reference trajectory:
//!
//! * Legitimate side: the log-rate is convex and decreasing in the per-user
//!   squared distances, so its tangent at the reference is a global lower
//!   bound that is affine in `||q(n) - w_k||^2 + H^2` — after substitution a
//!   concave quadratic in the coordinates, entering the objective directly.
//! * Leakage side: per-slot slacks
//!   `xi[m][n] <= lb(||q(n) - e_m||^2) - 2 r_m ||q(n) - e_m|| + r_m^2 + H^2`
//!   where `lb` is the affine minorant of the squared distance at the
//!   reference; the right side lower-bounds the true worst-case effective
//!   distance `(d - r)^2 + H^2`, so the leakage term `log2(1 + sum f2/xi)`
//!   upper-bounds the true eavesdropping rate. Its negative is concave in
//!   `xi` and enters the objective directly.
//! * Interference at a primary is evaluated at the affine minorant of the
//!   squared distance, which underestimates the distance and so
//!   overestimates the interference; `1/(lb(q) + H^2)` is convex on its
//!   domain, so the averaged cap row stays convex with no extra variables.
//!
//! Only slots whose exact pre-clamp rate is positive at the reference enter
//! the surrogate rate sums (see [`solve_trajectory`]); the clamp zeroes the
//! rest, so this makes the surrogate tight at the reference.
//!
//! Every replacement is conservative, so any feasible point of the convex
//! program is feasible for the exact model, and the surrogate objective is a
//! global lower bound on the exact clamped average rate, tight at the
//! reference. The `xi` slacks carry wide box bounds purely to keep the
//! barrier bounded when a zero-power slot makes them objective-neutral.

use crn_core::{
    channel::worst_case_eve_gain, rates::pre_hinge_secrecy_rate_cached, Point2, PowerProfile,
    Scenario, ScenarioCache, Trajectory,
};
use crn_solver::{
    solve, ConvexProgram, LinearEquality, SmoothFn, SocConstraint, SolveOptions, SolverReport,
    Status,
};
use nalgebra::{DMatrix, DVector};

use crate::error::OptError;

const LN2: f64 = std::f64::consts::LN_2;

/// Upper box bound for all slack variables (m^2); far above any reachable
/// squared distance, present only so the barrier cannot drift unboundedly
/// along objective-neutral slacks.
const SLACK_CAP: f64 = 1e10;

/// Required clearance beyond the disc radius when accepting an iterate.
fn clearance_margin(radius: f64) -> f64 {
    1e-7 * (1.0 + radius)
}

/// Variable layout of the trajectory round: interleaved UAV coordinates
/// first, then one eavesdropper-distance slack block per eavesdropper, each
/// `n_slots` wide.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    n: usize,
    m: usize,
}

impl Layout {
    /// Index of the x-coordinate of waypoint `n`.
    pub fn qx(&self, n: usize) -> usize {
        2 * n
    }
    /// Index of the y-coordinate of waypoint `n`.
    pub fn qy(&self, n: usize) -> usize {
        2 * n + 1
    }
    /// Index of the squared-distance slack for eavesdropper `m` at slot `n`.
    pub fn xi(&self, m: usize, n: usize) -> usize {
        (2 + m) * self.n + n
    }
    /// Total number of decision variables.
    pub fn dim(&self) -> usize {
        (2 + self.m) * self.n
    }
}

/// Shared value/derivative core of the surrogate mean secrecy rate: a
/// concave quadratic in the UAV coordinates (the linearized legitimate rate
/// with the squared distances substituted in) minus the leakage log-term in
/// the `xi` slacks. Used by both the objective and the efficiency row.
#[derive(Clone)]
struct SurrogateCore {
    layout: Layout,
    /// All reference constants of the tangent, summed over slots.
    const_sum: f64,
    /// Per-slot coefficients `(a, bx, by)` of the legitimate quadratic
    /// `-a (x^2 + y^2) + 2 bx x + 2 by y` with `a = sum_k beta_k >= 0`.
    quad: Vec<[f64; 3]>,
    /// Leakage SNR numerator per slot.
    f2: Vec<f64>,
    support: Vec<usize>,
    inv_n: f64,
}

impl SurrogateCore {
    /// Mean surrogate rate; NaN outside the slack domain (rejected upstream).
    fn mean_value(&self, x: &[f64]) -> f64 {
        let l = self.layout;
        let mut total = self.const_sum;
        for n in 0..l.n {
            let [a, bx, by] = self.quad[n];
            if a != 0.0 {
                let qx = x[l.qx(n)];
                let qy = x[l.qy(n)];
                total += -a * (qx * qx + qy * qy) + 2.0 * (bx * qx + by * qy);
            }
            if self.f2[n] == 0.0 {
                continue;
            }
            let mut s = 1.0;
            for m in 0..l.m {
                let xi = x[l.xi(m, n)];
                if xi <= 0.0 {
                    return f64::NAN;
                }
                s += self.f2[n] / xi;
            }
            total -= s.ln() / LN2;
        }
        total * self.inv_n
    }

    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        let l = self.layout;
        let wn = w * self.inv_n;
        for n in 0..l.n {
            let [a, bx, by] = self.quad[n];
            if a != 0.0 {
                grad[l.qx(n)] += wn * 2.0 * (bx - a * x[l.qx(n)]);
                grad[l.qy(n)] += wn * 2.0 * (by - a * x[l.qy(n)]);
            }
            let f2 = self.f2[n];
            if f2 == 0.0 {
                continue;
            }
            let mut s = 1.0;
            for m in 0..l.m {
                s += f2 / x[l.xi(m, n)];
            }
            for m in 0..l.m {
                let xi = x[l.xi(m, n)];
                grad[l.xi(m, n)] += wn * f2 / (LN2 * s * xi * xi);
            }
        }
    }

    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        let l = self.layout;
        let wn = w * self.inv_n;
        for n in 0..l.n {
            let a = self.quad[n][0];
            if a != 0.0 {
                hess[(l.qx(n), l.qx(n))] -= wn * 2.0 * a;
                hess[(l.qy(n), l.qy(n))] -= wn * 2.0 * a;
            }
            let f2 = self.f2[n];
            if f2 == 0.0 {
                continue;
            }
            let mut s = 1.0;
            for m in 0..l.m {
                s += f2 / x[l.xi(m, n)];
            }
            for m in 0..l.m {
                let xm = x[l.xi(m, n)];
                let im = l.xi(m, n);
                hess[(im, im)] -= wn * 2.0 * f2 / (LN2 * s * xm * xm * xm);
                let vm = f2 / (xm * xm);
                for mm in 0..l.m {
                    let xl = x[l.xi(mm, n)];
                    let il = l.xi(mm, n);
                    let vl = f2 / (xl * xl);
                    hess[(im, il)] += wn * vm * vl / (LN2 * s * s);
                }
            }
        }
    }
}

/// Objective wrapper: maximize the surrogate mean rate.
struct SurrogateObjective {
    core: SurrogateCore,
}

impl SmoothFn for SurrogateObjective {
    fn value(&self, x: &[f64]) -> f64 {
        self.core.mean_value(x)
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        self.core.add_grad(x, w, grad);
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        self.core.add_hess(x, w, hess);
    }
    fn support(&self) -> Option<&[usize]> {
        Some(&self.core.support)
    }
}

/// Efficiency row: `psi * mean(p) - surrogate mean rate <= 0` (convex).
struct EfficiencyRow {
    core: SurrogateCore,
    target: f64,
}

impl SmoothFn for EfficiencyRow {
    fn value(&self, x: &[f64]) -> f64 {
        self.target - self.core.mean_value(x)
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        self.core.add_grad(x, -w, grad);
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        self.core.add_hess(x, -w, hess);
    }
    fn support(&self) -> Option<&[usize]> {
        Some(&self.core.support)
    }
}

/// `(xi - lb(||q - e||^2) + 2 r ||q - e|| - r^2 - H^2) / H^2 <= 0` with the
/// norm smoothed for differentiability at the disc center.
struct XiRow {
    qx: usize,
    qy: usize,
    ix: usize,
    ex: f64,
    ey: f64,
    radius: f64,
    c0: f64,
    cx: f64,
    cy: f64,
    eps2: f64,
    h2: f64,
    inv_h2: f64,
    support: [usize; 3],
}

impl XiRow {
    fn snorm(&self, x: &[f64]) -> f64 {
        let u = x[self.qx] - self.ex;
        let v = x[self.qy] - self.ey;
        (u * u + v * v + self.eps2).sqrt()
    }
}

impl SmoothFn for XiRow {
    fn value(&self, x: &[f64]) -> f64 {
        let affine = self.c0 + self.cx * x[self.qx] + self.cy * x[self.qy];
        (x[self.ix] - affine + 2.0 * self.radius * self.snorm(x)
            - self.radius * self.radius
            - self.h2)
            * self.inv_h2
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        let s = self.snorm(x);
        let u = x[self.qx] - self.ex;
        let v = x[self.qy] - self.ey;
        grad[self.ix] += w * self.inv_h2;
        grad[self.qx] += w * (-self.cx + 2.0 * self.radius * u / s) * self.inv_h2;
        grad[self.qy] += w * (-self.cy + 2.0 * self.radius * v / s) * self.inv_h2;
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        let s = self.snorm(x);
        let u = x[self.qx] - self.ex;
        let v = x[self.qy] - self.ey;
        let c = w * 2.0 * self.radius * self.inv_h2 / (s * s * s);
        hess[(self.qx, self.qx)] += c * (v * v + self.eps2);
        hess[(self.qy, self.qy)] += c * (u * u + self.eps2);
        hess[(self.qx, self.qy)] -= c * u * v;
        hess[(self.qy, self.qx)] -= c * u * v;
    }
    fn support(&self) -> Option<&[usize]> {
        Some(&self.support)
    }
}

/// One transmitting slot's contribution to an interference cap row.
struct ItSlot {
    qx: usize,
    qy: usize,
    /// `p(n) * beta0 / (N * gamma)`.
    f3: f64,
    /// Affine minorant of the squared distance to the primary, tight at the
    /// reference: `lb(q) = c0 + cx qx + cy qy`.
    c0: f64,
    cx: f64,
    cy: f64,
}

/// Averaged interference cap at one primary, in units of the limit:
/// `sum_n f3(n) / (lb_n(q) + H^2) + jam/gamma - 1 <= 0`.
///
/// Each summand is `positive / affine`, convex on the halfspace where the
/// denominator is positive; outside that domain the row reports infinity
/// and the line search backs off.
struct InterferenceRow {
    slots: Vec<ItSlot>,
    /// `jam / gamma - 1`.
    constant: f64,
    h2: f64,
    support: Vec<usize>,
}

impl SmoothFn for InterferenceRow {
    fn value(&self, x: &[f64]) -> f64 {
        let mut total = self.constant;
        for s in &self.slots {
            let denom = s.c0 + s.cx * x[s.qx] + s.cy * x[s.qy] + self.h2;
            if denom <= 0.0 {
                return f64::INFINITY;
            }
            total += s.f3 / denom;
        }
        total
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        for s in &self.slots {
            let denom = s.c0 + s.cx * x[s.qx] + s.cy * x[s.qy] + self.h2;
            let scale = -w * s.f3 / (denom * denom);
            grad[s.qx] += scale * s.cx;
            grad[s.qy] += scale * s.cy;
        }
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        for s in &self.slots {
            let denom = s.c0 + s.cx * x[s.qx] + s.cy * x[s.qy] + self.h2;
            let scale = w * 2.0 * s.f3 / (denom * denom * denom);
            hess[(s.qx, s.qx)] += scale * s.cx * s.cx;
            hess[(s.qy, s.qy)] += scale * s.cy * s.cy;
            hess[(s.qx, s.qy)] += scale * s.cx * s.cy;
            hess[(s.qy, s.qx)] += scale * s.cx * s.cy;
        }
    }
    fn support(&self) -> Option<&[usize]> {
        Some(&self.support)
    }
}

/// Affine minorant of `||q - w||^2` at reference point `q_ref`: returns
/// `(c0, cx, cy)` with `lb(q) = c0 + cx qx + cy qy`, tight at `q_ref`.
fn squared_distance_minorant(q_ref: Point2, w: Point2) -> (f64, f64, f64) {
    let cx = 2.0 * (q_ref.x - w.x);
    let cy = 2.0 * (q_ref.y - w.y);
    let c0 = q_ref.dist_sq(w) - cx * q_ref.x - cy * q_ref.y;
    (c0, cx, cy)
}

/// Everything assembled for one trajectory round.
/// The assembled convex program of one trajectory round: exactly what the
/// barrier solver receives, exposed so independent diagnostics
/// (finite-difference gradient checks, midpoint convexity probes) can
/// inspect the real inputs.
pub struct TrajectoryProgram {
    /// Maximize the objective over waypoints and slacks, laid out per
    /// [`Layout`].
    pub prog: ConvexProgram,
    /// Strictly feasible start seeded from the reference trajectory.
    pub x0: DVector<f64>,
    /// Index map of the decision vector.
    pub layout: Layout,
}

/// Slots whose exact pre-clamp secrecy rate is positive at the reference.
/// Only these enter the surrogate sums: the clamp zeroes the rest, so
/// skipping them makes the surrogate equal the exact clamped mean at the
/// reference (instead of under-reporting it) while it still lower-bounds
/// the clamped mean at every other trajectory.
fn contributing_slots(
    traj_ref: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
) -> Result<Vec<bool>, OptError> {
    traj_ref
        .points
        .iter()
        .zip(&power.watts)
        .map(|(&q, &p)| Ok(pre_hinge_secrecy_rate_cached(q, p, scen, cache)? > 0.0))
        .collect()
}

fn build_core(
    traj_ref: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
    layout: Layout,
    mask: &[bool],
) -> SurrogateCore {
    let n = scen.n_slots;
    let h2 = scen.altitude * scen.altitude;
    let rho0 = scen.radio.rho0();
    let k_users = scen.num_users();
    let mut const_sum = 0.0;
    let mut quad = vec![[0.0; 3]; n];
    let mut f2 = vec![0.0; n];
    for slot in 0..n {
        if !mask[slot] {
            continue;
        }
        let q = traj_ref.points[slot];
        let p = power.watts[slot];
        f2[slot] = p * rho0;
        let f1: Vec<f64> = scen
            .users
            .iter()
            .enumerate()
            .map(|(k, _)| p * scen.radio.beta0 / cache.g2g_denom[k])
            .collect();
        let zeta_ref: Vec<f64> = scen.users.iter().map(|&w| q.dist_sq(w) + h2).collect();
        let sinr: f64 = (0..k_users).map(|k| f1[k] / zeta_ref[k]).sum();
        const_sum += (1.0 + sinr).ln() / LN2;
        let denom = LN2 * (1.0 + sinr);
        // Tangent slope beta_k of the legitimate rate in the k-th squared
        // distance; substituting zeta_k = ||q - w_k||^2 + H^2 turns the
        // affine tangent into a concave per-slot quadratic in q.
        for (k, &w) in scen.users.iter().enumerate() {
            let b = f1[k] / (zeta_ref[k] * zeta_ref[k]) / denom;
            const_sum += b * (zeta_ref[k] - h2 - (w.x * w.x + w.y * w.y));
            quad[slot][0] += b;
            quad[slot][1] += b * w.x;
            quad[slot][2] += b * w.y;
        }
    }
    let support: Vec<usize> = (0..n)
        .flat_map(|slot| [layout.qx(slot), layout.qy(slot)])
        .chain((0..layout.m).flat_map(|m| (0..n).map(move |slot| layout.xi(m, slot))))
        .collect();
    SurrogateCore {
        layout,
        const_sum,
        quad,
        f2,
        support,
        inv_n: 1.0 / n as f64,
    }
}

/// Assemble the convexified trajectory round around `traj_ref` without
/// solving it: the tangent-substituted objective, endpoint pins, speed
/// cones, disc keep-out rows, slack links, interference rows, and the
/// optional efficiency row.
pub fn trajectory_program(
    traj_ref: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
    opts: &SolveOptions,
) -> Result<TrajectoryProgram, OptError> {
    let n = scen.n_slots;
    let h2 = scen.altitude * scen.altitude;
    let inv_h2 = 1.0 / h2;
    let eps2 = opts.smooth_eps * opts.smooth_eps;

    // The reference must clear every disc or the worst-case geometry is
    // undefined; this also surfaces degenerate inputs early.
    for &q in &traj_ref.points {
        for (m, eve) in scen.eves.iter().enumerate() {
            worst_case_eve_gain(q, eve, scen.altitude, &scen.radio, m)?;
        }
    }

    let constrained: Vec<usize> = (0..scen.num_primaries())
        .filter(|&r| scen.gamma_it[r].is_finite())
        .collect();
    let layout = Layout {
        n,
        m: scen.num_eves(),
    };
    let dim = layout.dim();
    let mask = contributing_slots(traj_ref, power, scen, cache)?;
    let core = build_core(traj_ref, power, scen, cache, layout, &mask);
    let mut prog = ConvexProgram::new(
        dim,
        Box::new(SurrogateObjective { core: core.clone() }),
    );
    let mut x0 = DVector::zeros(dim);

    // UAV coordinates: free, pinned at both ends, speed-limited per segment.
    for slot in 0..n {
        x0[layout.qx(slot)] = traj_ref.points[slot].x;
        x0[layout.qy(slot)] = traj_ref.points[slot].y;
    }
    prog.equalities
        .push(LinearEquality::pin(layout.qx(0), scen.q_start.x));
    prog.equalities
        .push(LinearEquality::pin(layout.qy(0), scen.q_start.y));
    prog.equalities
        .push(LinearEquality::pin(layout.qx(n - 1), scen.q_end.x));
    prog.equalities
        .push(LinearEquality::pin(layout.qy(n - 1), scen.q_end.y));
    let step = scen.v_max * scen.slot_len;
    for slot in 0..n.saturating_sub(1) {
        prog.soc.push(SocConstraint::point_distance(
            layout.qx(slot),
            layout.qy(slot),
            layout.qx(slot + 1),
            layout.qy(slot + 1),
            step,
        ));
    }

    // Leakage-side slacks.
    for (m, eve) in scen.eves.iter().enumerate() {
        for slot in 0..n {
            let ix = layout.xi(m, slot);
            prog.lower[ix] = 0.5 * h2;
            prog.upper[ix] = SLACK_CAP;
            let q_ref = traj_ref.points[slot];
            let (c0, cx, cy) = squared_distance_minorant(q_ref, eve.pos_est);
            let d_hat = q_ref.dist(eve.pos_est);
            let rhs_ref = d_hat * d_hat - 2.0 * eve.radius * (d_hat * d_hat + eps2).sqrt()
                + eve.radius * eve.radius
                + h2;
            x0[ix] = (rhs_ref - (1e-3 * rhs_ref.abs()).max(1e-6)).max(0.55 * h2);
            prog.inequalities.push(Box::new(XiRow {
                qx: layout.qx(slot),
                qy: layout.qy(slot),
                ix,
                ex: eve.pos_est.x,
                ey: eve.pos_est.y,
                radius: eve.radius,
                c0,
                cx,
                cy,
                eps2,
                h2,
                inv_h2,
                support: [layout.qx(slot), layout.qy(slot), ix],
            }));
        }
    }

    // Averaged interference cap rows, one per constrained primary, carried
    // directly on the coordinates of the transmitting slots.
    for &r in &constrained {
        let w = scen.primaries[r];
        let gamma = scen.gamma_it[r];
        if cache.jam_const[r] >= gamma {
            return Err(OptError::InterferenceInfeasible {
                primary: r,
                floor: cache.jam_const[r],
                limit: gamma,
            });
        }
        let mut slots = Vec::new();
        let mut support = Vec::new();
        for slot in 0..n {
            let p = power.watts[slot];
            if p == 0.0 {
                continue;
            }
            let (c0, cx, cy) = squared_distance_minorant(traj_ref.points[slot], w);
            slots.push(ItSlot {
                qx: layout.qx(slot),
                qy: layout.qy(slot),
                f3: p * scen.radio.beta0 / (n as f64 * gamma),
                c0,
                cx,
                cy,
            });
            support.push(layout.qx(slot));
            support.push(layout.qy(slot));
        }
        if slots.is_empty() {
            continue;
        }
        prog.inequalities.push(Box::new(InterferenceRow {
            slots,
            constant: cache.jam_const[r] / gamma - 1.0,
            h2,
            support,
        }));
    }

    // Efficiency floor over the whole horizon (vacuous at zero energy, and
    // unsatisfiable without contributing slots — only reachable from an
    // already-infeasible reference, which the alternation never supplies).
    let total_p = power.total();
    if scen.see_min > 0.0 && total_p > 0.0 && mask.iter().any(|&b| b) {
        prog.inequalities.push(Box::new(EfficiencyRow {
            core,
            target: scen.see_min * total_p / n as f64,
        }));
    }

    Ok(TrajectoryProgram { prog, x0, layout })
}

/// Result of one trajectory-subproblem round.
#[derive(Debug)]
pub struct TrajectoryOutcome {
    pub trajectory: Trajectory,
    pub report: SolverReport,
    /// Number of step-halvings applied to restore disc clearance
    /// (0 = solver iterate used as-is; capped halvings fall back to the
    /// reference trajectory).
    pub shrink_steps: u32,
}

/// One convexification round of the trajectory subproblem at a fixed power
/// profile, linearized at `traj_ref`.
///
/// The returned trajectory always satisfies the endpoint, speed, and disc
/// clearance constraints; interference and efficiency hold by surrogate
/// conservatism whenever the solver iterate is used directly.
pub fn solve_trajectory(
    traj_ref: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
    opts: &SolveOptions,
) -> Result<TrajectoryOutcome, OptError> {
    let n = scen.n_slots;
    assert_eq!(traj_ref.len(), n, "reference trajectory length mismatch");
    assert_eq!(power.len(), n, "power profile length mismatch");
    let built = trajectory_program(traj_ref, power, scen, cache, opts)?;
    let report = solve(&built.prog, &built.x0, opts);
    let usable = match report.status {
        Status::Converged => true,
        Status::MaxIter => report.max_violation <= 1e-6,
        Status::Infeasible | Status::NumericalFailure => false,
    };
    if !usable {
        return Err(OptError::TrajectorySolveFailed {
            status: report.status,
        });
    }

    let mut raw: Vec<Point2> = (0..n)
        .map(|slot| {
            Point2::new(
                report.x_opt[built.layout.qx(slot)],
                report.x_opt[built.layout.qy(slot)],
            )
        })
        .collect();
    // Equalities hold to solver precision; make the endpoints exact.
    raw[0] = scen.q_start;
    raw[n - 1] = scen.q_end;

    // The convex program does not model the hard keep-out discs, so walk the
    // step back toward the (clear) reference until every slot clears.
    let mut scale = 1.0f64;
    for attempt in 0..=10u32 {
        let candidate: Vec<Point2> = traj_ref
            .points
            .iter()
            .zip(&raw)
            .map(|(&a, &b)| a + (b - a) * scale)
            .collect();
        let clear = candidate.iter().all(|&q| {
            scen.eves
                .iter()
                .all(|eve| q.dist(eve.pos_est) >= eve.radius + clearance_margin(eve.radius))
        });
        if clear {
            return Ok(TrajectoryOutcome {
                trajectory: Trajectory::new(candidate),
                report,
                shrink_steps: attempt,
            });
        }
        scale *= 0.5;
    }
    Ok(TrajectoryOutcome {
        trajectory: traj_ref.clone(),
        report,
        shrink_steps: 11,
    })
}

/// Surrogate mean secrecy rate linearized at `(traj_ref, power)` and
/// evaluated at `traj_eval`, with all slacks at their exact (tight) values.
///
/// This is the function the trajectory round maximizes, viewed on the
/// original variables: it equals the exact clamped mean rate at `traj_ref`
/// and lower-bounds it at every other trajectory.
pub fn surrogate_secrecy_mean(
    traj_ref: &Trajectory,
    power: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
    traj_eval: &Trajectory,
) -> Result<f64, OptError> {
    let n = scen.n_slots;
    assert_eq!(traj_ref.len(), n, "reference trajectory length mismatch");
    assert_eq!(traj_eval.len(), n, "evaluation trajectory length mismatch");
    let layout = Layout {
        n,
        m: scen.num_eves(),
    };
    let mask = contributing_slots(traj_ref, power, scen, cache)?;
    let core = build_core(traj_ref, power, scen, cache, layout, &mask);
    let mut x = vec![0.0; layout.dim()];
    for slot in 0..n {
        let q = traj_eval.points[slot];
        x[layout.qx(slot)] = q.x;
        x[layout.qy(slot)] = q.y;
        for (m, eve) in scen.eves.iter().enumerate() {
            let gain = worst_case_eve_gain(q, eve, scen.altitude, &scen.radio, m)?;
            x[layout.xi(m, slot)] = scen.radio.beta0 / gain;
        }
    }
    Ok(core.mean_value(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crn_core::consts::EPS_DIST;
    use crn_core::{evaluate_solution, EveEstimate, RadioConstants};
    use crn_solver::{check_convexity_midpoint, check_gradient, check_hessian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn radio() -> RadioConstants {
        RadioConstants {
            beta0: 1e-6,
            sigma2: 1e-14,
            alpha: 2.2,
            pe: 0.0,
        }
    }

    /// Five slots across a user, with one eavesdropper off to the side.
    fn small_scenario() -> Scenario {
        Scenario {
            users: vec![Point2::new(0.0, 120.0)],
            primaries: vec![Point2::new(900.0, 0.0)],
            eves: vec![EveEstimate {
                pos_est: Point2::new(0.0, -150.0),
                radius: 10.0,
            }],
            altitude: 100.0,
            q_start: Point2::new(-100.0, 0.0),
            q_end: Point2::new(100.0, 0.0),
            n_slots: 5,
            slot_len: 1.0,
            v_max: 60.0,
            p_max: 3.0,
            gamma_it: vec![f64::INFINITY],
            see_min: 0.0,
            radio: radio(),
        }
    }

    fn all_terms_finite(built: &TrajectoryProgram, x: &[f64]) -> bool {
        built.prog.inequalities.iter().all(|t| t.value(x).is_finite())
            && built.prog.objective.value(x).is_finite()
    }

    /// Random point strictly inside the domain of every program term; the
    /// interference rows restrict the coordinates to a halfspace, so sample
    /// with rejection and keep clear of the domain wall (probed at a radius
    /// safely above the finite-difference step) so derivative checks stay
    /// accurate.
    fn random_domain_point(
        built: &TrajectoryProgram,
        rng: &mut ChaCha8Rng,
        h2: f64,
    ) -> Vec<f64> {
        let layout = built.layout;
        'sample: for _ in 0..500 {
            let mut x = vec![0.0; layout.dim()];
            for slot in 0..layout.n {
                x[layout.qx(slot)] = rng.gen_range(-300.0..300.0);
                x[layout.qy(slot)] = rng.gen_range(-300.0..300.0);
            }
            for m in 0..layout.m {
                for slot in 0..layout.n {
                    x[layout.xi(m, slot)] = rng.gen_range(0.6 * h2..20.0 * h2);
                }
            }
            if !all_terms_finite(built, &x) {
                continue 'sample;
            }
            let mut probe = x.clone();
            for i in 0..x.len() {
                let s = 1e-2 * x[i].abs().max(1.0);
                for signed in [s, -s] {
                    probe[i] = x[i] + signed;
                    if !all_terms_finite(built, &probe) {
                        continue 'sample;
                    }
                }
                probe[i] = x[i];
            }
            return x;
        }
        panic!("failed to sample a domain point");
    }

    #[test]
    fn layout_blocks_are_disjoint_and_dense() {
        let l = Layout { n: 4, m: 3 };
        let mut seen = vec![false; l.dim()];
        for slot in 0..l.n {
            for &i in &[l.qx(slot), l.qy(slot)] {
                assert!(!seen[i]);
                seen[i] = true;
            }
            for m in 0..l.m {
                assert!(!seen[l.xi(m, slot)]);
                seen[l.xi(m, slot)] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn derivative_checks_on_all_terms() {
        let mut scen = small_scenario();
        scen.gamma_it = vec![1e-10];
        let cache = scen.build_cache().unwrap();
        let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
        let power = PowerProfile::uniform(1.0, scen.n_slots);
        let opts = SolveOptions::default();
        let built = trajectory_program(&traj, &power, &scen, &cache, &opts).unwrap();
        let h2 = scen.altitude * scen.altitude;
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE_31);
        for _ in 0..10 {
            let x = random_domain_point(&built, &mut rng, h2);
            assert!(
                check_gradient(built.prog.objective.as_ref(), &x, 1e-5) < 1e-5,
                "objective gradient mismatch"
            );
            assert!(
                check_hessian(built.prog.objective.as_ref(), &x, 1e-5) < 1e-4,
                "objective Hessian mismatch"
            );
            for (i, term) in built.prog.inequalities.iter().enumerate() {
                assert!(
                    check_gradient(term.as_ref(), &x, 1e-5) < 1e-5,
                    "row {i} gradient mismatch"
                );
                assert!(
                    check_hessian(term.as_ref(), &x, 1e-5) < 1e-4,
                    "row {i} Hessian mismatch"
                );
            }
        }
    }

    #[test]
    fn rows_are_convex_and_objective_concave_on_segments() {
        let mut scen = small_scenario();
        scen.gamma_it = vec![1e-10];
        let cache = scen.build_cache().unwrap();
        let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
        let power = PowerProfile::uniform(2.0, scen.n_slots);
        let opts = SolveOptions::default();
        let built = trajectory_program(&traj, &power, &scen, &cache, &opts).unwrap();
        let h2 = scen.altitude * scen.altitude;
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE_32);
        for _ in 0..25 {
            let a = random_domain_point(&built, &mut rng, h2);
            let b = random_domain_point(&built, &mut rng, h2);
            for (i, term) in built.prog.inequalities.iter().enumerate() {
                let defect = check_convexity_midpoint(term.as_ref(), &a, &b);
                assert!(defect <= 1e-8, "row {i} not convex: defect {defect}");
            }
            // The objective must be concave: its midpoint value dominates.
            let obj = built.prog.objective.as_ref();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect();
            let defect = obj.value(&mid) - 0.5 * (obj.value(&a) + obj.value(&b));
            assert!(defect >= -1e-8, "objective not concave: defect {defect}");
        }
    }

    #[test]
    fn surrogate_is_tight_at_reference_and_below_elsewhere() {
        let scen = small_scenario();
        let cache = scen.build_cache().unwrap();
        let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
        let power = PowerProfile::uniform(1.5, scen.n_slots);
        let exact_ref = evaluate_solution(&traj, &power, &scen)
            .unwrap()
            .per_slot
            .iter()
            .map(|s| s.pre_hinge)
            .sum::<f64>()
            / scen.n_slots as f64;
        let at_ref = surrogate_secrecy_mean(&traj, &power, &scen, &cache, &traj).unwrap();
        assert!(
            (at_ref - exact_ref).abs() <= 1e-9 * exact_ref.abs().max(1.0),
            "surrogate not tight at reference: {at_ref} vs {exact_ref}"
        );

        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE_33);
        for _ in 0..50 {
            // Random perturbed trajectories that keep disc clearance.
            let points: Vec<Point2> = traj
                .points
                .iter()
                .map(|&q| {
                    Point2::new(
                        q.x + rng.gen_range(-80.0..80.0),
                        q.y + rng.gen_range(0.0..120.0),
                    )
                })
                .collect();
            let other = Trajectory::new(points);
            let exact_other = evaluate_solution(&other, &power, &scen)
                .unwrap()
                .per_slot
                .iter()
                .map(|s| s.pre_hinge)
                .sum::<f64>()
                / scen.n_slots as f64;
            let surr = surrogate_secrecy_mean(&traj, &power, &scen, &cache, &other).unwrap();
            assert!(
                surr <= exact_other + 1e-9,
                "surrogate exceeded exact rate: {surr} vs {exact_other}"
            );
        }
    }

    #[test]
    fn trajectory_round_improves_the_exact_rate() {
        let scen = small_scenario();
        let cache = scen.build_cache().unwrap();
        let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
        let power = PowerProfile::uniform(1.0, scen.n_slots);
        let before = evaluate_solution(&traj, &power, &scen).unwrap().wasr;
        let out =
            solve_trajectory(&traj, &power, &scen, &cache, &SolveOptions::default()).unwrap();
        let after = evaluate_solution(&out.trajectory, &power, &scen).unwrap().wasr;
        assert!(
            after > before + 1e-4,
            "expected a strict improvement: {before} -> {after}"
        );
        // The path should bend toward the user (positive y) and away from
        // the eavesdropper (negative y side).
        let mid = out.trajectory.points[scen.n_slots / 2];
        assert!(mid.y > 1.0, "midpoint did not move toward the user: {mid:?}");
        // Motion constraints hold exactly.
        assert!(out.trajectory.points[0].dist(scen.q_start) < EPS_DIST);
        assert!(out.trajectory.points[scen.n_slots - 1].dist(scen.q_end) < EPS_DIST);
        let step = scen.v_max * scen.slot_len;
        for pair in out.trajectory.points.windows(2) {
            assert!(pair[0].dist(pair[1]) <= step * (1.0 + 1e-9));
        }
    }

    #[test]
    fn interference_cap_keeps_the_path_away_from_a_primary() {
        let mut scen = small_scenario();
        // The primary sits between the path and the user, so the free
        // optimum drifts toward it.
        scen.primaries = vec![Point2::new(0.0, 60.0)];
        let cache = scen.build_cache().unwrap();
        let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
        let power = PowerProfile::uniform(1.0, scen.n_slots);
        let mean_it = |t: &Trajectory| -> f64 {
            t.points
                .iter()
                .zip(&power.watts)
                .map(|(&q, &p)| p * scen.radio.beta0 / (q.dist_sq(scen.primaries[0]) + 1e4))
                .sum::<f64>()
                / scen.n_slots as f64
        };

        scen.gamma_it = vec![f64::INFINITY];
        let free =
            solve_trajectory(&traj, &power, &scen, &cache, &SolveOptions::default()).unwrap();
        let free_mean = mean_it(&free.trajectory);
        let ref_mean = mean_it(&traj);
        assert!(
            free_mean > ref_mean,
            "free optimum did not move toward the primary"
        );

        // A cap between the two keeps the straight-line reference feasible
        // (the linearized restriction needs a feasible reference) while
        // binding strictly below the free optimum.
        scen.gamma_it = vec![0.5 * (ref_mean + free_mean)];
        let capped =
            solve_trajectory(&traj, &power, &scen, &cache, &SolveOptions::default()).unwrap();
        let capped_mean = mean_it(&capped.trajectory);
        assert!(
            capped_mean <= scen.gamma_it[0] * (1.0 + 1e-9),
            "interference cap violated: {capped_mean:.3e} > {:.3e}",
            scen.gamma_it[0]
        );
        assert!(capped_mean < free_mean, "cap had no effect");
    }
}
