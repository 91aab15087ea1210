//! Cross-checks between the analytic model bounds, the Monte-Carlo
//! estimators, and the convex power solver.

use crn_core::rates::{eve_rate, interference_bound, legit_rate_lb, pre_hinge_secrecy_rate};
use crn_core::{
    evaluate_solution, EveEstimate, Point2, PowerProfile, RadioConstants, Scenario, Trajectory,
};
use crn_opt::{build_power_coeffs, solve_power};
use crn_oracle::{
    grid_oracle_power, mc_eve_rate, mc_interference, mc_legit_rate, mc_pre_hinge_secrecy,
    probe_states,
};
use crn_solver::SolveOptions;

const SAMPLES: usize = 20_000;
const SEED: u64 = 0xC0FFEE;

/// Jamming-enabled scenario with nodes safely outside the uncertainty discs.
fn jamming_scenario() -> Scenario {
    Scenario {
        users: vec![Point2::new(-40.0, 150.0), Point2::new(60.0, 130.0)],
        primaries: vec![Point2::new(300.0, -100.0)],
        eves: vec![
            EveEstimate {
                pos_est: Point2::new(0.0, -200.0),
                radius: 10.0,
            },
            EveEstimate {
                pos_est: Point2::new(180.0, 250.0),
                radius: 25.0,
            },
        ],
        altitude: 100.0,
        q_start: Point2::new(-120.0, 0.0),
        q_end: Point2::new(120.0, 0.0),
        n_slots: 6,
        slot_len: 1.0,
        v_max: 60.0,
        p_max: 3.0,
        gamma_it: vec![1e-10],
        see_min: 0.0,
        radio: RadioConstants {
            beta0: 1e-6,
            sigma2: 1e-14,
            alpha: 2.2,
            pe: 1e-3,
        },
    }
}

#[test]
fn legit_bound_never_exceeds_sampled_mean() {
    let s = jamming_scenario();
    for (i, &(q, p)) in probe_states(&s, 12, SEED).iter().enumerate() {
        let bound = legit_rate_lb(q, p, &s).unwrap();
        let est = mc_legit_rate(q, p, &s, SAMPLES, SEED.wrapping_add(i as u64));
        assert!(
            bound <= est.mean + 3.0 * est.std_err,
            "probe {i}: bound {bound} vs sampled {} +- {}",
            est.mean,
            est.std_err
        );
    }
}

#[test]
fn eve_bound_dominates_every_sample() {
    let s = jamming_scenario();
    for (i, &(q, p)) in probe_states(&s, 12, SEED ^ 0x11).iter().enumerate() {
        let bound = eve_rate(q, p, &s).unwrap();
        let est = mc_eve_rate(q, p, &s, SAMPLES, SEED.wrapping_add(i as u64));
        assert!(
            est.max <= bound + 1e-12 * (1.0 + bound.abs()),
            "probe {i}: sampled max {} exceeds bound {bound}",
            est.max
        );
    }
}

#[test]
fn interference_bound_dominates_sampled_mean() {
    let s = jamming_scenario();
    for (i, &(q, p)) in probe_states(&s, 12, SEED ^ 0x22).iter().enumerate() {
        for r in 0..s.num_primaries() {
            let bound = interference_bound(q, p, &s, r).unwrap();
            let est = mc_interference(q, p, &s, r, SAMPLES, SEED.wrapping_add(i as u64));
            assert!(
                est.mean - 3.0 * est.std_err <= bound,
                "probe {i} primary {r}: sampled {} +- {} vs bound {bound}",
                est.mean,
                est.std_err
            );
        }
    }
}

#[test]
fn secrecy_bound_never_exceeds_sampled_mean() {
    let s = jamming_scenario();
    for (i, &(q, p)) in probe_states(&s, 12, SEED ^ 0x33).iter().enumerate() {
        let bound = pre_hinge_secrecy_rate(q, p, &s).unwrap();
        let est = mc_pre_hinge_secrecy(q, p, &s, SAMPLES, SEED.wrapping_add(i as u64));
        assert!(
            bound <= est.mean + 3.0 * est.std_err,
            "probe {i}: bound {bound} vs sampled {} +- {}",
            est.mean,
            est.std_err
        );
    }
}

/// Three-slot instance where the exact power problem is solver-friendly but
/// the grid search knows nothing about its structure.
fn grid_scenario() -> Scenario {
    Scenario {
        users: vec![Point2::new(-60.0, 80.0), Point2::new(40.0, 100.0)],
        primaries: vec![Point2::new(100.0, -80.0)],
        eves: vec![EveEstimate {
            pos_est: Point2::new(200.0, 20.0),
            radius: 10.0,
        }],
        altitude: 100.0,
        q_start: Point2::new(-60.0, 0.0),
        q_end: Point2::new(60.0, 0.0),
        n_slots: 3,
        slot_len: 1.0,
        v_max: 60.0,
        p_max: 3.0,
        // Tight enough to bind well below the box.
        gamma_it: vec![4e-11],
        see_min: 0.0,
        radio: RadioConstants {
            beta0: 1e-6,
            sigma2: 1e-14,
            alpha: 2.2,
            pe: 0.0,
        },
    }
}

/// Iterate single convexification rounds to their fixed point.
fn solve_power_to_fixpoint(
    traj: &Trajectory,
    scen: &Scenario,
) -> PowerProfile {
    let cache = scen.build_cache().unwrap();
    let opts = SolveOptions::default();
    let mut power = PowerProfile::uniform(0.5 * scen.p_max, scen.n_slots);
    for _ in 0..200 {
        let out = solve_power(traj, &power, scen, &cache, &opts).unwrap();
        let step: f64 = out
            .power
            .watts
            .iter()
            .zip(&power.watts)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        power = out.power;
        if step < 1e-10 * scen.p_max {
            break;
        }
    }
    power
}

#[test]
fn power_solver_matches_exhaustive_grid() {
    let scen = grid_scenario();
    let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
    let cache = scen.build_cache().unwrap();

    let solved = solve_power_to_fixpoint(&traj, &scen);
    let solver_wasr = evaluate_solution(&traj, &solved, &scen).unwrap().wasr;

    let points = 201;
    let best = grid_oracle_power(&traj, &scen, points).unwrap().unwrap();

    // The grid optimum can sit at most one lattice spacing from the true
    // optimum per slot; the clamped rate's slope in power is below a / ln 2.
    let coeffs = build_power_coeffs(&traj, &scen, &cache).unwrap();
    let spacing = scen.p_max / (points - 1) as f64;
    let slack: f64 = coeffs
        .a
        .iter()
        .map(|a| a * spacing / std::f64::consts::LN_2)
        .sum::<f64>()
        / scen.n_slots as f64;

    assert!(
        solver_wasr >= best.wasr - slack,
        "solver {solver_wasr} below grid {} - {slack}",
        best.wasr
    );
    assert!(
        solver_wasr <= best.wasr + slack,
        "solver {solver_wasr} above grid {} + {slack} (grid missed the optimum?)",
        best.wasr
    );
}

#[test]
fn power_solver_matches_grid_under_efficiency_floor() {
    let mut scen = grid_scenario();
    scen.gamma_it = vec![1e-9];
    // An efficiency floor binding well below saturation.
    scen.see_min = 2.2;
    let traj = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);

    let solved = solve_power_to_fixpoint(&traj, &scen);
    let sol = evaluate_solution(&traj, &solved, &scen).unwrap();
    assert!(sol.see.unwrap() >= scen.see_min * (1.0 - 1e-6));

    let points = 201;
    let best = grid_oracle_power(&traj, &scen, points).unwrap().unwrap();
    let cache = scen.build_cache().unwrap();
    let coeffs = build_power_coeffs(&traj, &scen, &cache).unwrap();
    let spacing = scen.p_max / (points - 1) as f64;
    let slack: f64 = coeffs
        .a
        .iter()
        .map(|a| a * spacing / std::f64::consts::LN_2)
        .sum::<f64>()
        / scen.n_slots as f64;

    assert!(
        (solver_wasr_of(&traj, &solved, &scen) - best.wasr).abs() <= slack,
        "solver {} vs grid {} (slack {slack})",
        solver_wasr_of(&traj, &solved, &scen),
        best.wasr
    );
}

fn solver_wasr_of(traj: &Trajectory, power: &PowerProfile, scen: &Scenario) -> f64 {
    evaluate_solution(traj, power, scen).unwrap().wasr
}
