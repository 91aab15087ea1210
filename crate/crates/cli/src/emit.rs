//! Deterministic result files.
//!
//! Every float is printed with [`fmt_f`] — scientific notation with 12
//! significant digits — so two runs that compute identical numbers emit
//! byte-identical files.  All writers build the full file contents as a
//! `String` first; the thin [`write_results`] wrapper is the only place that
//! touches the filesystem.

use std::path::Path;

use crn_core::{FeasibilityReport, Point2, PowerProfile, Solution, Trajectory};
use crn_opt::{BcdRun, StopReason, SweepCurves};

/// Render a float with 12 significant digits in scientific notation.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.11e}")
}

/// `trajectory.csv`: one row per slot with the hover point in metres.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("slot,x_m,y_m\n");
    for (i, q) in traj.points.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_f(q.x), fmt_f(q.y)));
    }
    out
}

/// `power.csv`: one row per slot with the transmit power in watts.
pub fn power_csv(power: &PowerProfile) -> String {
    let mut out = String::from("slot,watts\n");
    for (i, p) in power.watts.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f(*p)));
    }
    out
}

/// `secrecy_rate.csv`: per-slot worst-case secrecy rate.
pub fn secrecy_csv(sol: &Solution) -> String {
    let mut out = String::from("slot,bits_per_s_hz\n");
    for (i, d) in sol.per_slot.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f(d.secrecy_rate)));
    }
    out
}

/// `convergence.csv`: objective after every alternation round.  Row 0 is the
/// starting point, so a run with `k` rounds produces `k + 1` rows.
pub fn convergence_csv(run: &BcdRun) -> String {
    let mut out = String::from("iter,wasr\n");
    out.push_str(&format!("0,{}\n", fmt_f(run.trace.initial_wasr)));
    for (i, it) in run.trace.iterations.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_f(it.wasr)));
    }
    out
}

/// Stable string form of the stop reason for `summary.json`.
pub fn stop_label(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "converged",
        StopReason::IterationLimit => "iteration-limit",
        StopReason::BlockFailure => "block-failure",
    }
}

fn feasibility_json(report: &FeasibilityReport, indent: &str) -> String {
    let rows: Vec<String> = report.interference.iter().map(|v| fmt_f(*v)).collect();
    format!(
        "{{\n{indent}  \"endpoint_start_m\": {},\n{indent}  \"endpoint_end_m\": {},\n\
         {indent}  \"speed_margin_m\": {},\n{indent}  \"power_upper_w\": {},\n\
         {indent}  \"power_lower_w\": {},\n{indent}  \"interference_rel\": [{}],\n\
         {indent}  \"see_rel\": {},\n{indent}  \"eve_clearance_m\": {},\n\
         {indent}  \"max_violation\": {},\n{indent}  \"feasible\": {}\n{indent}}}",
        fmt_f(report.endpoint_start),
        fmt_f(report.endpoint_end),
        fmt_f(report.speed),
        fmt_f(report.power_upper),
        fmt_f(report.power_lower),
        rows.join(", "),
        fmt_f(report.see),
        fmt_f(report.eve_clearance),
        fmt_f(report.max_violation()),
        report.is_feasible_default(),
    )
}

fn see_json(see: Option<f64>) -> String {
    match see {
        Some(v) => fmt_f(v),
        None => "null".into(),
    }
}

/// `summary.json` for an optimizer run.  `scheme` is the command-line token
/// the caller selected.
pub fn run_summary_json(run: &BcdRun, report: &FeasibilityReport, scheme: &str) -> String {
    format!(
        "{{\n  \"scheme\": \"{scheme}\",\n  \"wasr\": {},\n  \"see\": {},\n  \
         \"initial_wasr\": {},\n  \"iterations\": {},\n  \"stop\": \"{}\",\n  \
         \"feasibility\": {}\n}}\n",
        fmt_f(run.solution.wasr),
        see_json(run.solution.see),
        fmt_f(run.trace.initial_wasr),
        run.trace.iterations.len(),
        stop_label(run.trace.stop),
        feasibility_json(report, "  "),
    )
}

/// Summary for an externally supplied solution (`evaluate`): no scheme or
/// iteration history, just the score and the audit.
pub fn eval_summary_json(sol: &Solution, report: &FeasibilityReport) -> String {
    format!(
        "{{\n  \"wasr\": {},\n  \"see\": {},\n  \"feasibility\": {}\n}}\n",
        fmt_f(sol.wasr),
        see_json(sol.see),
        feasibility_json(report, "  "),
    )
}

/// `sweep.csv`: one row per (threshold, scheme) pair, thresholds in dBm.
pub fn sweep_csv(curves: &SweepCurves) -> String {
    let mut out = String::from("gamma_dbm,scheme,wasr\n");
    for (i, &gamma_w) in curves.gammas.iter().enumerate() {
        let dbm = crn_core::units::watts_to_dbm(gamma_w);
        for (token, value) in [
            ("proposed", curves.proposed[i]),
            ("opft", curves.power_only[i]),
            ("fpot", curves.trajectory_only[i]),
            ("fpft", curves.baseline[i]),
        ] {
            out.push_str(&format!("{},{token},{}\n", fmt_f(dbm), fmt_f(value)));
        }
    }
    out
}

/// Write the five standard result files for one optimizer run.
pub fn write_results(
    run: &BcdRun,
    report: &FeasibilityReport,
    scheme: &str,
    dir: &Path,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trajectory.csv"), trajectory_csv(&run.solution.trajectory))?;
    std::fs::write(dir.join("power.csv"), power_csv(&run.solution.power))?;
    std::fs::write(dir.join("secrecy_rate.csv"), secrecy_csv(&run.solution))?;
    std::fs::write(dir.join("convergence.csv"), convergence_csv(run))?;
    std::fs::write(dir.join("summary.json"), run_summary_json(run, report, scheme))?;
    Ok(())
}

/// Parse a `trajectory.csv` produced by [`trajectory_csv`] (or compatible).
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<Point2>, String> {
    let mut points = Vec::new();
    for (row, fields) in csv_rows(text, "slot,x_m,y_m", 3)? {
        let x = parse_field(&fields[1], row, "x_m")?;
        let y = parse_field(&fields[2], row, "y_m")?;
        points.push(Point2::new(x, y));
    }
    if points.is_empty() {
        return Err("trajectory file contains no rows".into());
    }
    Ok(points)
}

/// Parse a `power.csv` produced by [`power_csv`] (or compatible).
pub fn parse_power_csv(text: &str) -> Result<Vec<f64>, String> {
    let mut watts = Vec::new();
    for (row, fields) in csv_rows(text, "slot,watts", 2)? {
        watts.push(parse_field(&fields[1], row, "watts")?);
    }
    if watts.is_empty() {
        return Err("power file contains no rows".into());
    }
    Ok(watts)
}

/// Split a CSV body into rows, checking the header, the field count, and
/// that the leading `slot` column counts 0, 1, 2, ...
#[allow(clippy::type_complexity)]
fn csv_rows(
    text: &str,
    expected_header: &str,
    fields: usize,
) -> Result<Vec<(usize, Vec<String>)>, String> {
    let mut lines = text.lines().map(str::trim);
    let header = lines.next().unwrap_or("");
    if header != expected_header {
        return Err(format!(
            "expected header '{expected_header}', found '{header}'"
        ));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        if cols.len() != fields {
            return Err(format!(
                "row {idx}: expected {fields} fields, found {}",
                cols.len()
            ));
        }
        let slot: usize = cols[0]
            .parse()
            .map_err(|_| format!("row {idx}: slot index '{}' is not an integer", cols[0]))?;
        if slot != rows.len() {
            return Err(format!(
                "row {idx}: slot index {slot} out of order (expected {})",
                rows.len()
            ));
        }
        rows.push((idx, cols));
    }
    Ok(rows)
}

fn parse_field(raw: &str, row: usize, name: &str) -> Result<f64, String> {
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("row {row}: {name} value '{raw}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("row {row}: {name} value '{raw}' is not finite"));
    }
    Ok(v)
}
