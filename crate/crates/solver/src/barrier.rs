//! The two-phase log-barrier method.

use nalgebra::{DMatrix, DVector};

use crate::program::{ConvexProgram, SmoothFn, SocConstraint};
use crate::report::{SolveOptions, SolverReport, Status};

/// Smoothed scalar form of a second-order-cone constraint.
struct SocSmooth {
    rows: Vec<(Vec<(usize, f64)>, f64)>,
    c: Vec<(usize, f64)>,
    d: f64,
    scale: f64,
    eps: f64,
    /// True when `c` is empty and the constraint is kept in exact squared
    /// form `||Ax + b||^2 - d^2 <= 0`.
    squared: bool,
    support: Vec<usize>,
}

impl SocSmooth {
    fn new(soc: &SocConstraint, eps: f64) -> Self {
        let mut support: Vec<usize> = soc
            .rows
            .iter()
            .flat_map(|(coeffs, _)| coeffs.iter().map(|&(i, _)| i))
            .chain(soc.c.iter().map(|&(i, _)| i))
            .collect();
        support.sort_unstable();
        support.dedup();
        let scale = if soc.scale > 0.0 { soc.scale } else { 1.0 };
        Self {
            rows: soc.rows.clone(),
            c: soc.c.clone(),
            d: soc.d,
            scale,
            eps,
            squared: soc.c.is_empty(),
            support,
        }
    }

    fn row_value(&self, row: usize, x: &[f64]) -> f64 {
        let (coeffs, offset) = &self.rows[row];
        let mut v = *offset;
        for &(i, co) in coeffs {
            v += co * x[i];
        }
        v
    }

    fn norm_sq(&self, x: &[f64]) -> f64 {
        (0..self.rows.len()).map(|r| self.row_value(r, x).powi(2)).sum()
    }
}

impl SmoothFn for SocSmooth {
    fn value(&self, x: &[f64]) -> f64 {
        if self.squared {
            (self.norm_sq(x) - self.d * self.d) / self.scale
        } else {
            let mut bound = self.d;
            for &(i, co) in &self.c {
                bound += co * x[i];
            }
            ((self.norm_sq(x) + self.eps * self.eps).sqrt() - bound) / self.scale
        }
    }

    fn add_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) {
        if self.squared {
            for r in 0..self.rows.len() {
                let rv = self.row_value(r, x);
                for &(i, co) in &self.rows[r].0 {
                    grad[i] += w * 2.0 * rv * co / self.scale;
                }
            }
        } else {
            let s = (self.norm_sq(x) + self.eps * self.eps).sqrt();
            for r in 0..self.rows.len() {
                let rv = self.row_value(r, x);
                for &(i, co) in &self.rows[r].0 {
                    grad[i] += w * rv * co / (s * self.scale);
                }
            }
            for &(i, co) in &self.c {
                grad[i] -= w * co / self.scale;
            }
        }
    }

    fn add_hess(&self, x: &[f64], w: f64, hess: &mut DMatrix<f64>) {
        if self.squared {
            for r in 0..self.rows.len() {
                let coeffs = &self.rows[r].0;
                for &(i, ci) in coeffs {
                    for &(j, cj) in coeffs {
                        hess[(i, j)] += w * 2.0 * ci * cj / self.scale;
                    }
                }
            }
        } else {
            let s = (self.norm_sq(x) + self.eps * self.eps).sqrt();
            // sum_r a_r a_r' / s ...
            for r in 0..self.rows.len() {
                let coeffs = &self.rows[r].0;
                for &(i, ci) in coeffs {
                    for &(j, cj) in coeffs {
                        hess[(i, j)] += w * ci * cj / (s * self.scale);
                    }
                }
            }
            // ... minus u u' / s with u = sum_r (r_v / s) a_r.
            let mut u: Vec<(usize, f64)> = self.support.iter().map(|&i| (i, 0.0)).collect();
            for r in 0..self.rows.len() {
                let rv = self.row_value(r, x);
                for &(i, co) in &self.rows[r].0 {
                    let slot = u.iter_mut().find(|(idx, _)| *idx == i).unwrap();
                    slot.1 += rv * co / s;
                }
            }
            for &(i, ui) in &u {
                for &(j, uj) in &u {
                    hess[(i, j)] -= w * ui * uj / (s * self.scale);
                }
            }
        }
    }

    fn support(&self) -> Option<&[usize]> {
        Some(&self.support)
    }
}

/// Linear-equality data in matrix form, pre-factored for projections.
struct EqData {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl EqData {
    fn build(prog: &ConvexProgram, dim_ext: usize) -> Option<Self> {
        if prog.equalities.is_empty() {
            return None;
        }
        let p = prog.equalities.len();
        let mut a = DMatrix::zeros(p, dim_ext);
        let mut b = DVector::zeros(p);
        for (row, eq) in prog.equalities.iter().enumerate() {
            for &(i, co) in &eq.coeffs {
                a[(row, i)] += co;
            }
            b[row] = eq.rhs;
        }
        Some(Self { a, b })
    }

    /// Project `x` onto `{ A x = b }` (minimum-norm correction).
    fn project(&self, x: &mut DVector<f64>) -> Result<(), ()> {
        let residual = &self.a * &*x - &self.b;
        let aat = &self.a * self.a.transpose();
        let chol = aat.cholesky().ok_or(())?;
        let y = chol.solve(&residual);
        *x -= self.a.transpose() * y;
        Ok(())
    }

    /// Remove the row-space component of `r` (projection onto null(A)).
    fn project_to_null(&self, r: &DVector<f64>) -> DVector<f64> {
        let aat = &self.a * self.a.transpose();
        match aat.cholesky() {
            Some(chol) => {
                let y = chol.solve(&(&self.a * r));
                r - self.a.transpose() * y
            }
            None => r.clone(),
        }
    }
}

/// Barrier evaluation context shared by Phase-I and the main solve.
struct Barrier<'a> {
    /// Core problem dimension (excludes the Phase-I slack).
    n: usize,
    /// Working dimension (`n` or `n + 1`).
    dim: usize,
    phase1: bool,
    objective: &'a dyn SmoothFn,
    terms: &'a [&'a dyn SmoothFn],
    lower: &'a [f64],
    upper: &'a [f64],
}

impl<'a> Barrier<'a> {
    /// `B_t(x)`, or `None` outside the barrier domain.
    fn value(&self, t: f64, x: &DVector<f64>) -> Option<f64> {
        let xc = &x.as_slice()[..self.n];
        let mut b = if self.phase1 {
            t * x[self.n]
        } else {
            -t * self.objective.value(xc)
        };
        if !b.is_finite() {
            return None;
        }
        let s = if self.phase1 { x[self.n] } else { 0.0 };
        for f in self.terms {
            let g = f.value(xc) - s;
            if !(g < 0.0) || !g.is_finite() {
                return None;
            }
            b -= (-g).ln();
        }
        for j in 0..self.n {
            if self.lower[j].is_finite() {
                let d = x[j] - self.lower[j];
                if !(d > 0.0) {
                    return None;
                }
                b -= d.ln();
            }
            if self.upper[j].is_finite() {
                let d = self.upper[j] - x[j];
                if !(d > 0.0) {
                    return None;
                }
                b -= d.ln();
            }
        }
        b.is_finite().then_some(b)
    }

    /// Gradient and Hessian of `B_t` at a domain point.
    fn derivatives(
        &self,
        t: f64,
        x: &DVector<f64>,
        scratch: &mut DVector<f64>,
        grad: &mut DVector<f64>,
        hess: &mut DMatrix<f64>,
    ) {
        grad.fill(0.0);
        hess.fill(0.0);
        let xc = &x.as_slice()[..self.n];
        if self.phase1 {
            grad[self.n] = t;
        } else {
            self.objective
                .add_grad(xc, -t, &mut grad.as_mut_slice()[..self.n]);
            self.objective.add_hess(xc, -t, hess);
        }
        let s = if self.phase1 { x[self.n] } else { 0.0 };
        for f in self.terms {
            let g = f.value(xc) - s;
            let w = 1.0 / (-g);
            f.add_grad(xc, w, &mut grad.as_mut_slice()[..self.n]);
            f.add_hess(xc, w, hess);
            if self.phase1 {
                grad[self.n] -= w;
            }
            // Rank-one barrier curvature (1/g^2) grad_g grad_g'.
            match f.support() {
                Some(sup) => {
                    for &i in sup {
                        scratch[i] = 0.0;
                    }
                    f.add_grad(xc, 1.0, &mut scratch.as_mut_slice()[..self.n]);
                    for &i in sup {
                        let gi = scratch[i];
                        if gi == 0.0 {
                            continue;
                        }
                        for &j in sup {
                            hess[(i, j)] += w * w * gi * scratch[j];
                        }
                        if self.phase1 {
                            hess[(i, self.n)] -= w * w * gi;
                            hess[(self.n, i)] -= w * w * gi;
                        }
                    }
                    if self.phase1 {
                        hess[(self.n, self.n)] += w * w;
                    }
                }
                None => {
                    scratch.fill(0.0);
                    f.add_grad(xc, 1.0, &mut scratch.as_mut_slice()[..self.n]);
                    for i in 0..self.n {
                        let gi = scratch[i];
                        if gi == 0.0 {
                            continue;
                        }
                        for j in 0..self.n {
                            let gj = scratch[j];
                            if gj != 0.0 {
                                hess[(i, j)] += w * w * gi * gj;
                            }
                        }
                        if self.phase1 {
                            hess[(i, self.n)] -= w * w * gi;
                            hess[(self.n, i)] -= w * w * gi;
                        }
                    }
                    if self.phase1 {
                        hess[(self.n, self.n)] += w * w;
                    }
                }
            }
        }
        for j in 0..self.n {
            if self.lower[j].is_finite() {
                let d = x[j] - self.lower[j];
                grad[j] -= 1.0 / d;
                hess[(j, j)] += 1.0 / (d * d);
            }
            if self.upper[j].is_finite() {
                let d = self.upper[j] - x[j];
                grad[j] += 1.0 / d;
                hess[(j, j)] += 1.0 / (d * d);
            }
        }
    }
}

/// Newton direction for `min B` subject to `A dx = 0`, via Cholesky with a
/// deterministic ridge escalation. Returns `(dx, lambda^2)`.
fn newton_direction(
    hess: &DMatrix<f64>,
    grad: &DVector<f64>,
    eq: Option<&EqData>,
) -> Option<(DVector<f64>, f64)> {
    let dim = grad.len();
    let mut base = 0.0f64;
    for i in 0..dim {
        base = base.max(hess[(i, i)].abs());
    }
    if base == 0.0 || !base.is_finite() {
        base = 1.0;
    }
    let mut ridge = 0.0f64;
    for attempt in 0..8 {
        let mut h = hess.clone();
        if ridge > 0.0 {
            for i in 0..dim {
                h[(i, i)] += ridge;
            }
        }
        if let Some(chol) = h.cholesky() {
            let dx = match eq {
                None => -chol.solve(grad),
                Some(eq) => {
                    let hg = chol.solve(grad);
                    let ha = chol.solve(&eq.a.transpose());
                    let s = &eq.a * &ha;
                    let rhs = -(&eq.a * &hg);
                    let nu = match s.clone().cholesky() {
                        Some(c) => c.solve(&rhs),
                        None => s.lu().solve(&rhs)?,
                    };
                    -(hg + ha * nu)
                }
            };
            let lambda2 = (-grad.dot(&dx)).max(0.0);
            if dx.iter().all(|v| v.is_finite()) && lambda2.is_finite() {
                return Some((dx, lambda2));
            }
        }
        ridge = if attempt == 0 { base * 1e-12 } else { ridge * 100.0 };
    }
    None
}

enum StageEnd {
    /// Newton decrement under tolerance.
    Centered,
    /// Iteration budget exhausted or line search stalled at a usable point.
    Stopped,
    /// Non-finite values or unfactorable Hessian.
    Failed,
}

/// Minimize `B_t` from `x` in place. Returns how the stage ended and adds
/// accepted steps to `iters`.
#[allow(clippy::too_many_arguments)]
fn newton_stage(
    barrier: &Barrier,
    t: f64,
    x: &mut DVector<f64>,
    eq: Option<&EqData>,
    opts: &SolveOptions,
    iters: &mut usize,
    early_exit: &mut dyn FnMut(&DVector<f64>) -> bool,
) -> StageEnd {
    let dim = barrier.dim;
    let mut scratch = DVector::zeros(dim);
    let mut grad = DVector::zeros(dim);
    let mut hess = DMatrix::zeros(dim, dim);
    for _ in 0..opts.max_newton_per_stage {
        let b0 = match barrier.value(t, x) {
            Some(b) => b,
            None => return StageEnd::Failed,
        };
        barrier.derivatives(t, x, &mut scratch, &mut grad, &mut hess);
        let (dx, lambda2) = match newton_direction(&hess, &grad, eq) {
            Some(v) => v,
            None => return StageEnd::Failed,
        };
        if lambda2 / 2.0 <= opts.newton_tol {
            return StageEnd::Centered;
        }
        // Backtracking line search: stay in the barrier domain, then Armijo.
        let slope = -lambda2;
        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..opts.max_backtracks {
            let xt = &*x + &dx * step;
            if let Some(bt) = barrier.value(t, &xt) {
                if bt <= b0 + opts.armijo_c * step * slope {
                    *x = xt;
                    accepted = true;
                    break;
                }
            }
            step *= opts.backtrack;
        }
        if !accepted {
            // No usable decrease left at this scale; the stage is as
            // centered as floating point allows.
            return StageEnd::Stopped;
        }
        *iters += 1;
        if early_exit(x) {
            return StageEnd::Stopped;
        }
    }
    StageEnd::Stopped
}

/// Nudge strictly inside finite bounds so box barrier terms are defined.
fn nudge_into_box(x: &mut DVector<f64>, lower: &[f64], upper: &[f64]) {
    for j in 0..lower.len() {
        let lo = lower[j];
        let up = upper[j];
        if lo.is_finite() && up.is_finite() {
            let width = up - lo;
            let margin = (width * 1e-9).max(f64::MIN_POSITIVE);
            x[j] = x[j].clamp(lo + margin, up - margin);
        } else if lo.is_finite() {
            let margin = 1e-9 * lo.abs().max(1.0);
            if x[j] <= lo {
                x[j] = lo + margin;
            }
        } else if up.is_finite() {
            let margin = 1e-9 * up.abs().max(1.0);
            if x[j] >= up {
                x[j] = up - margin;
            }
        }
    }
}

/// Solve a convex program from start point `x0`.
///
/// Failures are reported through [`Status`], never by panicking: the report
/// always carries the best iterate seen.
pub fn solve(prog: &ConvexProgram, x0: &DVector<f64>, opts: &SolveOptions) -> SolverReport {
    let n = prog.dim;
    assert_eq!(x0.len(), n, "start point dimension mismatch");
    assert_eq!(prog.lower.len(), n, "lower bound dimension mismatch");
    assert_eq!(prog.upper.len(), n, "upper bound dimension mismatch");

    let soc_terms: Vec<SocSmooth> = prog
        .soc
        .iter()
        .map(|s| SocSmooth::new(s, opts.smooth_eps))
        .collect();
    let terms: Vec<&dyn SmoothFn> = prog
        .inequalities
        .iter()
        .map(|b| b.as_ref() as &dyn SmoothFn)
        .chain(soc_terms.iter().map(|s| s as &dyn SmoothFn))
        .collect();

    let fail = |x: DVector<f64>, status: Status, iters: usize, phase1: bool| {
        let obj = prog.objective.value(&x.as_slice()[..n]);
        let max_violation = measure_violation(prog, &terms, &x);
        SolverReport {
            x_opt: x,
            obj,
            max_violation,
            kkt_residual: f64::INFINITY,
            iterations: iters,
            status,
            stage_objectives: Vec::new(),
            phase1_used: phase1,
        }
    };

    let mut x = x0.clone();
    nudge_into_box(&mut x, &prog.lower, &prog.upper);
    let eq = EqData::build(prog, n);
    if let Some(eq) = &eq {
        if eq.project(&mut x).is_err() {
            return fail(x, Status::NumericalFailure, 0, false);
        }
        nudge_into_box(&mut x, &prog.lower, &prog.upper);
        // One more projection in case the nudge moved a pinned coordinate;
        // our equality rows never fight finite boxes, but stay safe.
        let _ = eq.project(&mut x);
    }

    let mut iterations = 0usize;
    let mut phase1_used = false;

    // Phase-I if any smooth term is violated at the start.
    let needs_phase1 = {
        let xc = &x.as_slice()[..n];
        terms.iter().any(|f| {
            let g = f.value(xc);
            !(g < 0.0) || !g.is_finite()
        })
    };
    if needs_phase1 {
        phase1_used = true;
        match phase1(prog, &terms, &x, eq.as_ref(), opts, &mut iterations) {
            Ok(feasible) => x = feasible,
            Err(status) => return fail(x, status, iterations, true),
        }
    }

    // Main barrier schedule.
    let barrier = Barrier {
        n,
        dim: n,
        phase1: false,
        objective: prog.objective.as_ref(),
        terms: &terms,
        lower: &prog.lower,
        upper: &prog.upper,
    };
    let m = prog.num_barrier_terms() as f64;
    let mut t = opts.t0;
    let mut stage_objectives = Vec::new();
    let mut gap_met = false;
    let mut no_early = |_: &DVector<f64>| false;
    for _ in 0..opts.max_stages {
        match newton_stage(&barrier, t, &mut x, eq.as_ref(), opts, &mut iterations, &mut no_early)
        {
            StageEnd::Failed => return fail(x, Status::NumericalFailure, iterations, phase1_used),
            StageEnd::Centered | StageEnd::Stopped => {}
        }
        stage_objectives.push(prog.objective.value(&x.as_slice()[..n]));
        if m / t <= opts.tol_gap {
            gap_met = true;
            break;
        }
        t *= opts.mu_barrier;
    }

    // Final diagnostics at the last iterate.
    let obj = prog.objective.value(&x.as_slice()[..n]);
    let max_violation = measure_violation(prog, &terms, &x);
    let kkt_residual = {
        let mut scratch = DVector::zeros(n);
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        barrier.derivatives(t, &x, &mut scratch, &mut grad, &mut hess);
        let r = match &eq {
            Some(eq) => eq.project_to_null(&grad),
            None => grad,
        };
        r.amax() / t
    };
    let status = if !gap_met {
        Status::MaxIter
    } else if max_violation <= opts.tol_feas && kkt_residual <= opts.tol_kkt {
        Status::Converged
    } else {
        Status::MaxIter
    };
    SolverReport {
        x_opt: x,
        obj,
        max_violation,
        kkt_residual,
        iterations,
        status,
        stage_objectives,
        phase1_used,
    }
}

/// Worst signed residual over all constraint families.
fn measure_violation(prog: &ConvexProgram, terms: &[&dyn SmoothFn], x: &DVector<f64>) -> f64 {
    let n = prog.dim;
    let xc = &x.as_slice()[..n];
    let mut worst = f64::NEG_INFINITY;
    for f in terms {
        worst = worst.max(f.value(xc));
    }
    for j in 0..n {
        if prog.lower[j].is_finite() {
            worst = worst.max(prog.lower[j] - x[j]);
        }
        if prog.upper[j].is_finite() {
            worst = worst.max(x[j] - prog.upper[j]);
        }
    }
    for eqr in &prog.equalities {
        let mut v = -eqr.rhs;
        for &(i, co) in &eqr.coeffs {
            v += co * x[i];
        }
        worst = worst.max(v.abs());
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    worst
}

/// Phase-I: minimize a shared slack `s` with every inequality relaxed to
/// `g_i(x) <= s`, exiting as soon as `s` is safely negative.
fn phase1(
    prog: &ConvexProgram,
    terms: &[&dyn SmoothFn],
    x_start: &DVector<f64>,
    eq: Option<&EqData>,
    opts: &SolveOptions,
    iterations: &mut usize,
) -> Result<DVector<f64>, Status> {
    let n = prog.dim;
    let dim = n + 1;
    // Extended start: slack strictly above the worst violation.
    let worst = terms
        .iter()
        .map(|f| f.value(&x_start.as_slice()[..n]))
        .fold(f64::NEG_INFINITY, f64::max);
    if !worst.is_finite() {
        return Err(Status::NumericalFailure);
    }
    let mut x = DVector::zeros(dim);
    x.rows_mut(0, n).copy_from(x_start);
    x[n] = worst + 1.0 + 0.1 * worst.abs();

    // Equalities keep their rows, padded with a zero column for the slack.
    let eq_ext = eq.map(|e| {
        let mut a = DMatrix::zeros(e.a.nrows(), dim);
        a.view_mut((0, 0), (e.a.nrows(), n)).copy_from(&e.a);
        EqData {
            a,
            b: e.b.clone(),
        }
    });

    // Slack-shifted barrier over the extended vector; box still binds x only.
    let dummy = LinearZero;
    let barrier = Barrier {
        n,
        dim,
        phase1: true,
        objective: &dummy,
        terms,
        lower: &prog.lower,
        upper: &prog.upper,
    };

    let margin = opts.phase1_margin;
    let mut t = opts.t0;
    for _ in 0..opts.max_stages {
        let mut exit = |xt: &DVector<f64>| xt[n] < -margin;
        match newton_stage(&barrier, t, &mut x, eq_ext.as_ref(), opts, iterations, &mut exit) {
            StageEnd::Failed => return Err(Status::NumericalFailure),
            StageEnd::Centered | StageEnd::Stopped => {}
        }
        if x[n] < -margin {
            break;
        }
        t *= opts.mu_barrier;
        if (terms.len() as f64) / t <= opts.tol_gap {
            break;
        }
    }
    if x[n] < 0.0 {
        Ok(x.rows(0, n).into_owned())
    } else {
        Err(Status::Infeasible)
    }
}

/// Placeholder objective for Phase-I (the slack coordinate is handled
/// directly by the barrier context).
struct LinearZero;

impl SmoothFn for LinearZero {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn add_grad(&self, _x: &[f64], _w: f64, _grad: &mut [f64]) {}
    fn add_hess(&self, _x: &[f64], _w: f64, _hess: &mut DMatrix<f64>) {}
}
