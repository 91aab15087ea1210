//! The per-slot transmit-power subproblem at a fixed trajectory.
//!
//! With the trajectory frozen, the per-slot secrecy rate collapses to
//! `log2(1 + a_n p_n) - log2(1 + b_n p_n)` with constants `a_n` (legitimate
//! aggregate gain over the fading-averaged interference-plus-noise floor)
//! and `b_n` (worst-case colluding eavesdropper gain over noise). The
//! difference is not concave in `p_n`, so each round convexifies it: the
//! eavesdropper term is replaced by its tangent at a reference profile,
//! yielding a concave global lower bound that is tight at the reference.
//!
//! The resulting program — maximize the mean surrogate subject to the
//! interference-temperature rows, the optional energy-efficiency row, and
//! the power box — is solved by the interior-point engine. The returned
//! profile always satisfies the exact constraints (the surrogate efficiency
//! row underestimates the true hinged efficiency, and the interference rows
//! are exact).
//!
//! Slots where the colluding eavesdropper gain dominates the legitimate one
//! can never yield positive secrecy at any power; their exact optimum is
//! silence. They are pinned to zero and removed from the rate sums, which
//! makes the surrogate coincide with the exact clamped objective at the
//! reference — the property that guarantees each accepted round improves
//! the true objective.

use crn_core::{
    channel::{a2g_gain, worst_case_eve_gain},
    evaluate_solution, PowerProfile, Scenario, ScenarioCache, Trajectory,
};
use crn_solver::{
    solve, ConvexProgram, LinearEquality, LinearFn, SmoothFn, SolveOptions, SolverReport, Status,
};
use nalgebra::{DMatrix, DVector};

use crate::error::OptError;

const LN2: f64 = std::f64::consts::LN_2;

/// Power entries below this fraction of `p_max` are snapped to exactly zero
/// after a solve (the barrier never reaches the boundary on its own).
const ZERO_CLAMP_FRACTION: f64 = 1e-7;

/// Rate/interference coefficients of one trajectory, per slot.
#[derive(Debug, Clone)]
pub struct PowerCoeffs {
    /// Legitimate aggregate gain per slot: the secrecy-bearing SINR is
    /// `a[n] * p[n]`.
    pub a: Vec<f64>,
    /// Worst-case colluding eavesdropper aggregate gain per slot: the leaked
    /// SNR is `b[n] * p[n]`.
    pub b: Vec<f64>,
    /// Channel gain from the UAV to each primary receiver: `[primary][slot]`.
    pub it_gain: Vec<Vec<f64>>,
}

/// Collapse a trajectory into per-slot rate and interference coefficients.
pub fn build_power_coeffs(
    traj: &Trajectory,
    scen: &Scenario,
    cache: &ScenarioCache,
) -> Result<PowerCoeffs, OptError> {
    let n = traj.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for &q in &traj.points {
        let mut an = 0.0;
        for (k, &w) in scen.users.iter().enumerate() {
            an += a2g_gain(q, w, scen.altitude, &scen.radio) / cache.g2g_denom[k];
        }
        a.push(an);
        let mut bn = 0.0;
        for (m, eve) in scen.eves.iter().enumerate() {
            bn += worst_case_eve_gain(q, eve, scen.altitude, &scen.radio, m)?
                / scen.radio.sigma2;
        }
        b.push(bn);
    }
    let it_gain = scen
        .primaries
        .iter()
        .map(|&w| {
            traj.points
                .iter()
                .map(|&q| a2g_gain(q, w, scen.altitude, &scen.radio))
                .collect()
        })
        .collect();
    Ok(PowerCoeffs { a, b, it_gain })
}

/// Exact (pre-hinge) secrecy rate of slot `n` at power `p`.
pub fn exact_pre_hinge_slot(coeffs: &PowerCoeffs, n: usize, p: f64) -> f64 {
    ((1.0 + coeffs.a[n] * p).ln() - (1.0 + coeffs.b[n] * p).ln()) / LN2
}

/// Concave per-slot lower bound of the pre-hinge secrecy rate, built by
/// linearizing the eavesdropper term at a reference power profile.
///
/// For every slot, `slot_value(n, p) <= exact` with equality at the
/// reference.
#[derive(Debug, Clone)]
pub struct PowerSurrogate {
    a: Vec<f64>,
    lin_const: Vec<f64>,
    lin_slope: Vec<f64>,
}

impl PowerSurrogate {
    pub fn from_reference(coeffs: &PowerCoeffs, p_ref: &[f64]) -> Self {
        assert_eq!(coeffs.a.len(), p_ref.len(), "reference length mismatch");
        let mut lin_const = Vec::with_capacity(p_ref.len());
        let mut lin_slope = Vec::with_capacity(p_ref.len());
        for (n, &pr) in p_ref.iter().enumerate() {
            let b = coeffs.b[n];
            let base = 1.0 + b * pr;
            // Tangent of the convex term -log2(1 + b p) at p_ref; it lies
            // below the term everywhere, so the surrogate is a lower bound.
            let slope = -b / (LN2 * base);
            lin_slope.push(slope);
            lin_const.push(-base.ln() / LN2 - slope * pr);
        }
        Self {
            a: coeffs.a.clone(),
            lin_const,
            lin_slope,
        }
    }

    /// Surrogate secrecy rate of slot `n` at power `p`.
    pub fn slot_value(&self, n: usize, p: f64) -> f64 {
        (1.0 + self.a[n] * p).ln() / LN2 + self.lin_const[n] + self.lin_slope[n] * p
    }

    /// Mean surrogate rate over all slots.
    pub fn mean_value(&self, p: &[f64]) -> f64 {
        let total: f64 = (0..self.a.len()).map(|n| self.slot_value(n, p[n])).sum();
        total / self.a.len() as f64
    }

    fn slot_slope(&self, n: usize, p: f64) -> f64 {
        self.a[n] / (LN2 * (1.0 + self.a[n] * p)) + self.lin_slope[n]
    }

    fn slot_curvature(&self, n: usize, p: f64) -> f64 {
        let a = self.a[n];
        let base = 1.0 + a * p;
        -a * a / (LN2 * base * base)
    }
}

/// Objective: mean surrogate secrecy rate over the contributing slots
/// (concave). Slots where the eavesdroppers dominate the users can never
/// yield positive secrecy at any power, so they are left out of the sum —
/// which makes the surrogate agree with the exact clamped rate at the
/// reference instead of under-reporting it.
struct MeanSurrogate {
    s: PowerSurrogate,
    inv_n: f64,
    included: Vec<bool>,
}

impl SmoothFn for MeanSurrogate {
    fn value(&self, x: &[f64]) -> f64 {
        let total: f64 = (0..x.len())
            .filter(|&n| self.included[n])
            .map(|n| self.s.slot_value(n, x[n]))
            .sum();
        total * self.inv_n
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        for n in 0..x.len() {
            if self.included[n] {
                grad[n] += w * self.inv_n * self.s.slot_slope(n, x[n]);
            }
        }
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        for n in 0..x.len() {
            if self.included[n] {
                hess[(n, n)] += w * self.inv_n * self.s.slot_curvature(n, x[n]);
            }
        }
    }
}

/// Energy-efficiency row: `psi * mean(p) - mean surrogate <= 0` (convex).
/// The rate side sums the same contributing slots as the objective, so it
/// never exceeds — and at the reference equals — the exact clamped mean.
struct EfficiencyRow {
    s: PowerSurrogate,
    psi: f64,
    inv_n: f64,
    included: Vec<bool>,
}

impl SmoothFn for EfficiencyRow {
    fn value(&self, x: &[f64]) -> f64 {
        let mean_p: f64 = x.iter().sum::<f64>() * self.inv_n;
        let rate: f64 = (0..x.len())
            .filter(|&n| self.included[n])
            .map(|n| self.s.slot_value(n, x[n]))
            .sum();
        self.psi * mean_p - rate * self.inv_n
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        for n in 0..x.len() {
            let slope = if self.included[n] {
                self.s.slot_slope(n, x[n])
            } else {
                0.0
            };
            grad[n] += w * self.inv_n * (self.psi - slope);
        }
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        for n in 0..x.len() {
            if self.included[n] {
                hess[(n, n)] -= w * self.inv_n * self.s.slot_curvature(n, x[n]);
            }
        }
    }
}

/// Result of one power-subproblem round.
#[derive(Debug)]
pub struct PowerOutcome {
    pub power: PowerProfile,
    pub report: SolverReport,
}

/// The assembled convex program of one power round: exactly what the barrier
/// solver receives, exposed so independent diagnostics (finite-difference
/// gradient checks, midpoint convexity probes) can inspect the real inputs.
pub struct PowerProgram {
    /// Maximize the objective over the per-slot transmit powers.
    pub program: ConvexProgram,
    /// Strictly feasible start: the reference profile boxed into the domain.
    pub start: DVector<f64>,
    /// Which slots can contribute positive secrecy (`a > b`); the rest are
    /// pinned to zero transmit power.
    pub included: Vec<bool>,
}

/// Assemble the convexified power round around `p_ref` without solving it.
///
/// `Ok(None)` means no slot can contribute positive secrecy at this
/// trajectory; the all-zero profile is then exactly optimal and there is
/// nothing to solve.
pub fn power_program(
    traj: &Trajectory,
    p_ref: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
) -> Result<Option<PowerProgram>, OptError> {
    let n = scen.n_slots;
    assert_eq!(traj.len(), n, "trajectory length mismatch");
    assert_eq!(p_ref.len(), n, "reference power length mismatch");
    let coeffs = build_power_coeffs(traj, scen, cache)?;

    // Jamming alone must leave headroom at every constrained primary.
    for (r, &gamma) in scen.gamma_it.iter().enumerate() {
        if gamma.is_finite() && cache.jam_const[r] >= gamma {
            return Err(OptError::InterferenceInfeasible {
                primary: r,
                floor: cache.jam_const[r],
                limit: gamma,
            });
        }
    }

    // A slot can produce positive secrecy at some power if and only if the
    // legitimate combined gain beats the colluding eavesdropper gain: the
    // pre-clamp rate log2((1+ap)/(1+bp)) keeps the sign of a-b on p > 0.
    // Hopeless slots are pinned to zero transmit power -- their exact
    // optimum -- and removed from the rate sums.
    let included: Vec<bool> = (0..n).map(|slot| coeffs.a[slot] > coeffs.b[slot]).collect();
    if !included.iter().any(|&i| i) {
        return Ok(None);
    }

    let p_ref_box: Vec<f64> = p_ref
        .watts
        .iter()
        .enumerate()
        .map(|(slot, &p)| {
            if included[slot] {
                p.clamp(0.0, scen.p_max)
            } else {
                0.0
            }
        })
        .collect();
    let surrogate = PowerSurrogate::from_reference(&coeffs, &p_ref_box);
    let inv_n = 1.0 / n as f64;

    let mut prog = ConvexProgram::new(
        n,
        Box::new(MeanSurrogate {
            s: surrogate.clone(),
            inv_n,
            included: included.clone(),
        }),
    );
    prog.lower = vec![0.0; n];
    prog.upper = vec![scen.p_max; n];
    for (slot, &inc) in included.iter().enumerate() {
        if !inc {
            // Pinned exactly to zero; widen the box so the barrier keeps a
            // strict interior around the pinned value.
            prog.equalities.push(LinearEquality::pin(slot, 0.0));
            prog.lower[slot] = -scen.p_max;
        }
    }
    // Interference-temperature rows, normalized by the limit so every row
    // lives on a comparable scale.
    for (r, &gamma) in scen.gamma_it.iter().enumerate() {
        if !gamma.is_finite() {
            continue;
        }
        let coeffs_row: Vec<(usize, f64)> = (0..n)
            .map(|slot| (slot, coeffs.it_gain[r][slot] * inv_n / gamma))
            .collect();
        let constant = cache.jam_const[r] / gamma - 1.0;
        prog.inequalities
            .push(Box::new(LinearFn::new(coeffs_row, constant)));
    }
    if scen.see_min > 0.0 {
        prog.inequalities.push(Box::new(EfficiencyRow {
            s: surrogate,
            psi: scen.see_min,
            inv_n,
            included: included.clone(),
        }));
    }

    Ok(Some(PowerProgram {
        program: prog,
        start: DVector::from_vec(p_ref_box),
        included,
    }))
}

/// One convexification round of the power subproblem at a fixed trajectory,
/// linearized at `p_ref`.
///
/// The returned profile satisfies the exact interference, efficiency, and
/// box constraints whenever the solve succeeds; callers decide whether it
/// actually improves the exact hinged objective.
pub fn solve_power(
    traj: &Trajectory,
    p_ref: &PowerProfile,
    scen: &Scenario,
    cache: &ScenarioCache,
    opts: &SolveOptions,
) -> Result<PowerOutcome, OptError> {
    let n = scen.n_slots;
    let Some(built) = power_program(traj, p_ref, scen, cache)? else {
        // Nothing can contribute: silence is optimal and trivially feasible.
        return Ok(PowerOutcome {
            power: PowerProfile::new(vec![0.0; n]),
            report: SolverReport {
                x_opt: DVector::zeros(n),
                obj: 0.0,
                max_violation: 0.0,
                kkt_residual: 0.0,
                iterations: 0,
                status: Status::Converged,
                stage_objectives: Vec::new(),
                phase1_used: false,
            },
        });
    };
    let report = solve(&built.program, &built.start, opts);
    let usable = match report.status {
        Status::Converged => true,
        Status::MaxIter => report.max_violation <= 1e-6,
        Status::Infeasible | Status::NumericalFailure => false,
    };
    if !usable {
        return Err(OptError::PowerSolveFailed {
            status: report.status,
        });
    }

    let raw: Vec<f64> = report
        .x_opt
        .iter()
        .map(|&p| p.clamp(0.0, scen.p_max))
        .collect();
    let mut clamped = raw.clone();
    let mut changed = false;
    for p in &mut clamped {
        if *p < ZERO_CLAMP_FRACTION * scen.p_max {
            changed = *p != 0.0 || changed;
            *p = 0.0;
        }
    }
    // Snapping slots to zero lowers interference and energy but also rate;
    // keep the snap only if the exact efficiency floor still holds.
    let power = if changed && scen.see_min > 0.0 {
        let candidate = PowerProfile::new(clamped.clone());
        let keeps_floor = match evaluate_solution(traj, &candidate, scen) {
            Ok(sol) => sol.see.map_or(true, |mu| mu >= scen.see_min),
            Err(_) => false,
        };
        if keeps_floor {
            candidate
        } else {
            PowerProfile::new(raw)
        }
    } else {
        PowerProfile::new(clamped)
    };
    Ok(PowerOutcome { power, report })
}
