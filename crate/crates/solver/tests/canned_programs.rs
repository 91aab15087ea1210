//! End-to-end solves of small programs with hand-derived optima.

use nalgebra::{DMatrix, DVector};

use crn_solver::{
    check_convexity_midpoint, check_gradient, check_hessian, solve, ConvexProgram, LinearEquality,
    LinearFn, SmoothFn, SocConstraint, SolveOptions, Status,
};

const LN2: f64 = std::f64::consts::LN_2;

/// `log2(1 + x) - c x` in one variable.
struct LogMinusLinear {
    c: f64,
}

impl SmoothFn for LogMinusLinear {
    fn value(&self, x: &[f64]) -> f64 {
        (1.0 + x[0]).ln() / LN2 - self.c * x[0]
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        grad[0] += w * (1.0 / ((1.0 + x[0]) * LN2) - self.c);
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        hess[(0, 0)] += w * (-1.0 / ((1.0 + x[0]) * (1.0 + x[0]) * LN2));
    }
}

/// `-sum_i (x_i - center_i)^2`.
struct NegSquaredDistance {
    center: Vec<f64>,
}

impl SmoothFn for NegSquaredDistance {
    fn value(&self, x: &[f64]) -> f64 {
        -self
            .center
            .iter()
            .zip(x)
            .map(|(c, xi)| (xi - c) * (xi - c))
            .sum::<f64>()
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        for i in 0..self.center.len() {
            grad[i] += w * (-2.0 * (x[i] - self.center[i]));
        }
    }
    fn add_hess(&self, _x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        for i in 0..self.center.len() {
            hess[(i, i)] += w * (-2.0);
        }
    }
}

/// `||x||^2 - r2` as a convex inequality.
struct BallConstraint {
    r2: f64,
}

impl SmoothFn for BallConstraint {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>() - self.r2
    }
    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        for (g, v) in grad.iter_mut().zip(x) {
            *g += w * 2.0 * v;
        }
    }
    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        for i in 0..x.len() {
            hess[(i, i)] += w * 2.0;
        }
    }
}

fn opts() -> SolveOptions {
    SolveOptions::default()
}

#[test]
fn scalar_log_utility_interior_optimum() {
    // maximize log2(1+x) - 0.3 x on [0, 10]; stationarity gives
    // x* = 1/(0.3 ln 2) - 1.
    let mut prog = ConvexProgram::new(1, Box::new(LogMinusLinear { c: 0.3 }));
    prog.lower[0] = 0.0;
    prog.upper[0] = 10.0;
    let report = solve(&prog, &DVector::from_vec(vec![5.0]), &opts());
    let x_star = 1.0 / (0.3 * LN2) - 1.0;
    let obj_star = (1.0 + x_star).ln() / LN2 - 0.3 * x_star;
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!(!report.phase1_used);
    assert!(
        (report.x_opt[0] - x_star).abs() < 1e-5,
        "x = {}, expected {}",
        report.x_opt[0],
        x_star
    );
    assert!((report.obj - obj_star).abs() < 1e-7);
}

#[test]
fn box_constrained_quadratic_hits_interior_center() {
    let mut prog = ConvexProgram::new(
        2,
        Box::new(NegSquaredDistance {
            center: vec![2.0, -1.0],
        }),
    );
    prog.lower = vec![-5.0, -5.0];
    prog.upper = vec![5.0, 5.0];
    let report = solve(&prog, &DVector::from_vec(vec![0.0, 0.0]), &opts());
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!((report.x_opt[0] - 2.0).abs() < 1e-3);
    assert!((report.x_opt[1] + 1.0).abs() < 1e-3);
    assert!(report.obj > -1e-6, "obj = {}", report.obj);
}

#[test]
fn linear_objective_on_disc_touches_boundary() {
    // maximize x + y subject to x^2 + y^2 <= 2; optimum (1,1) with value 2.
    let mut prog = ConvexProgram::new(
        2,
        Box::new(LinearFn::new(vec![(0, 1.0), (1, 1.0)], 0.0)),
    );
    prog.inequalities.push(Box::new(BallConstraint { r2: 2.0 }));
    let report = solve(&prog, &DVector::from_vec(vec![0.0, 0.0]), &opts());
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!((report.obj - 2.0).abs() < 1e-5, "obj = {}", report.obj);
    assert!((report.x_opt[0] - 1.0).abs() < 1e-3);
    assert!((report.x_opt[1] - 1.0).abs() < 1e-3);
    assert!(report.max_violation <= 0.0, "iterate left the feasible set");

    // The outer barrier schedule must improve the objective monotonically.
    for pair in report.stage_objectives.windows(2) {
        assert!(
            pair[1] >= pair[0] - 1e-9,
            "stage objectives regressed: {:?}",
            report.stage_objectives
        );
    }
}

#[test]
fn equality_constrained_quadratic_is_exact() {
    // maximize -(x^2 + y^2) subject to x + y = 2; optimum (1,1), value -2.
    let mut prog = ConvexProgram::new(
        2,
        Box::new(NegSquaredDistance {
            center: vec![0.0, 0.0],
        }),
    );
    prog.equalities
        .push(LinearEquality {
            coeffs: vec![(0, 1.0), (1, 1.0)],
            rhs: 2.0,
        });
    // Start point violates the equality; the solver projects it first.
    let report = solve(&prog, &DVector::from_vec(vec![7.0, -1.0]), &opts());
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!((report.x_opt[0] - 1.0).abs() < 1e-8);
    assert!((report.x_opt[1] - 1.0).abs() < 1e-8);
    assert!((report.obj + 2.0).abs() < 1e-10);
    assert!(report.max_violation < 1e-9);
}

#[test]
fn squared_form_cone_acts_as_disc() {
    // maximize -((x-3)^2 + y^2) subject to ||(x, y)|| <= 1; optimum (1, 0).
    let mut prog = ConvexProgram::new(
        2,
        Box::new(NegSquaredDistance {
            center: vec![3.0, 0.0],
        }),
    );
    prog.soc.push(SocConstraint {
        rows: vec![(vec![(0, 1.0)], 0.0), (vec![(1, 1.0)], 0.0)],
        c: Vec::new(),
        d: 1.0,
        scale: 1.0,
    });
    let report = solve(&prog, &DVector::from_vec(vec![0.0, 0.0]), &opts());
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!((report.x_opt[0] - 1.0).abs() < 1e-3, "x = {}", report.x_opt[0]);
    assert!(report.x_opt[1].abs() < 1e-3);
    assert!((report.obj + 4.0).abs() < 1e-4);
    assert!(report.max_violation <= 0.0);
}

#[test]
fn smoothed_cone_with_affine_bound() {
    // maximize -x subject to ||(y, 1)|| <= x: the bound forces
    // x >= sqrt(y^2 + 1), so the optimum is x = 1 at y = 0 (up to the
    // norm-smoothing offset).
    let mut prog = ConvexProgram::new(2, Box::new(LinearFn::new(vec![(0, -1.0)], 0.0)));
    prog.soc.push(SocConstraint {
        rows: vec![(vec![(1, 1.0)], 0.0), (Vec::new(), 1.0)],
        c: vec![(0, 1.0)],
        d: 0.0,
        scale: 1.0,
    });
    let report = solve(&prog, &DVector::from_vec(vec![5.0, 2.0]), &opts());
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!((report.x_opt[0] - 1.0).abs() < 1e-4, "x = {}", report.x_opt[0]);
    assert!(report.x_opt[1].abs() < 1e-3);
}

#[test]
fn phase_one_recovers_from_infeasible_start() {
    // maximize -x on [0, 1] subject to 0.5 - x <= 0, starting at x = 0.1.
    let mut prog = ConvexProgram::new(1, Box::new(LinearFn::new(vec![(0, -1.0)], 0.0)));
    prog.inequalities
        .push(Box::new(LinearFn::new(vec![(0, -1.0)], 0.5)));
    prog.lower[0] = 0.0;
    prog.upper[0] = 1.0;
    let report = solve(&prog, &DVector::from_vec(vec![0.1]), &opts());
    assert_eq!(report.status, Status::Converged, "{report:?}");
    assert!(report.phase1_used);
    assert!(
        (report.x_opt[0] - 0.5).abs() < 1e-5,
        "x = {}",
        report.x_opt[0]
    );
}

#[test]
fn contradictory_constraints_are_certified_infeasible() {
    // x <= -1 and x >= 1 simultaneously.
    let mut prog = ConvexProgram::new(1, Box::new(LinearFn::new(vec![(0, 1.0)], 0.0)));
    prog.inequalities
        .push(Box::new(LinearFn::new(vec![(0, 1.0)], 1.0)));
    prog.inequalities
        .push(Box::new(LinearFn::new(vec![(0, -1.0)], 1.0)));
    let report = solve(&prog, &DVector::from_vec(vec![0.0]), &opts());
    assert_eq!(report.status, Status::Infeasible, "{report:?}");
    assert!(report.phase1_used);
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let build = || {
        let mut prog = ConvexProgram::new(
            2,
            Box::new(LinearFn::new(vec![(0, 1.0), (1, 1.0)], 0.0)),
        );
        prog.inequalities.push(Box::new(BallConstraint { r2: 2.0 }));
        prog
    };
    let x0 = DVector::from_vec(vec![0.25, -0.5]);
    let a = solve(&build(), &x0, &opts());
    let b = solve(&build(), &x0, &opts());
    assert_eq!(a.x_opt.as_slice(), b.x_opt.as_slice());
    assert_eq!(a.obj.to_bits(), b.obj.to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn derivative_and_convexity_diagnostics_agree() {
    let ball = BallConstraint { r2: 2.0 };
    assert!(check_gradient(&ball, &[0.3, -1.2], 1e-6) < 1e-7);
    assert!(check_hessian(&ball, &[0.3, -1.2], 1e-6) < 1e-6);
    assert!(check_convexity_midpoint(&ball, &[0.0, 0.0], &[1.0, 3.0]) < 1e-12);

    let util = LogMinusLinear { c: 0.3 };
    assert!(check_gradient(&util, &[2.5], 1e-6) < 1e-8);
    assert!(check_hessian(&util, &[2.5], 1e-6) < 1e-6);
    // The utility is concave, so its negation passes the midpoint test.
    struct Neg<'a>(&'a dyn SmoothFn);
    impl SmoothFn for Neg<'_> {
        fn value(&self, x: &[f64]) -> f64 {
            -self.0.value(x)
        }
        fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
            self.0.add_grad(x, -w, grad);
        }
        fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
            self.0.add_hess(x, -w, hess);
        }
    }
    assert!(check_convexity_midpoint(&Neg(&util), &[0.5], &[8.0]) < 1e-12);
}
