//! Full-scale regression: the complete alternation on a mission-sized
//! scenario (60 slots, three users, two eavesdroppers, three primaries)
//! must converge quickly to an audited-feasible solution that beats its
//! starting point.

use crn_core::{audit_evaluated, EveEstimate, Point2, RadioConstants, Scenario};
use crn_opt::{optimize, BcdOptions, Scheme, StopReason};
use std::time::Instant;

fn mission_scenario() -> Scenario {
    Scenario {
        users: vec![
            Point2::new(-200.0, 500.0),
            Point2::new(-100.0, 500.0),
            Point2::new(0.0, 500.0),
        ],
        primaries: vec![
            Point2::new(-100.0, 0.0),
            Point2::new(-200.0, 400.0),
            Point2::new(-100.0, 400.0),
        ],
        eves: vec![
            EveEstimate {
                pos_est: Point2::new(-150.0, 700.0),
                radius: 10.0,
            },
            EveEstimate {
                pos_est: Point2::new(-50.0, 700.0),
                radius: 10.0,
            },
        ],
        altitude: 100.0,
        q_start: Point2::new(-250.0, 800.0),
        q_end: Point2::new(0.0, -200.0),
        n_slots: 60,
        slot_len: 1.0,
        v_max: 60.0,
        p_max: 3.0,
        gamma_it: vec![1e-11; 3],
        see_min: 1.0,
        radio: RadioConstants {
            beta0: 1e-6,
            sigma2: 1e-14,
            alpha: 2.2,
            pe: 1e-3,
        },
    }
}

#[test]
fn mission_scale_alternation_converges() {
    let scen = mission_scenario();
    let opts = BcdOptions::default();
    let t0 = Instant::now();
    let run = optimize(&scen, Scheme::Proposed, &opts).expect("optimization failed");
    let elapsed = t0.elapsed();
    println!(
        "mission-scale run: {:?}, {} iterations, wasr {:.6} -> {:.6}",
        elapsed,
        run.trace.iterations.len(),
        run.trace.initial_wasr,
        run.solution.wasr
    );

    assert_eq!(run.trace.stop, StopReason::Converged, "{:?}", run.trace);
    assert!(
        run.trace.iterations.len() <= 20,
        "took {} rounds",
        run.trace.iterations.len()
    );
    let mut prev = run.trace.initial_wasr;
    for it in &run.trace.iterations {
        assert!(it.wasr >= prev - 1e-12, "trace regressed");
        prev = it.wasr;
    }
    assert!(
        run.solution.wasr > run.trace.initial_wasr,
        "no improvement over the start"
    );
    let report = audit_evaluated(&run.solution, &scen);
    assert!(
        report.is_feasible_default(),
        "final iterate fails the exact audit: {report:?}"
    );
}
