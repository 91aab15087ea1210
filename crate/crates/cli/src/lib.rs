//! Command-line front end for the secrecy-rate planner.
//!
//! Subcommands:
//!
//! * `optimize` — run one scheme on a scenario and emit the five result
//!   files (`trajectory.csv`, `power.csv`, `secrecy_rate.csv`,
//!   `convergence.csv`, `summary.json`) into `--out`.
//! * `sweep-gamma` — trace all four schemes across a ladder of
//!   interference-temperature limits, emitting `sweep.csv`.
//! * `validate` — cross-check the analytic bounds against Monte-Carlo
//!   estimates and the power solver against an exhaustive grid on the given
//!   scenario.  The sampling seed is `CRN_SEED` when set.
//! * `evaluate` — audit an externally supplied (trajectory, power) pair.
//!
//! Exit codes: 0 success, 1 infeasible scenario or solution, 2 bad input,
//! 3 numerical failure.  All emitted floats carry 12 significant digits and
//! every command is deterministic, so repeated runs produce byte-identical
//! files.

pub mod emit;
pub mod schema;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use crn_core::rates::{eve_rate, interference_bound, legit_rate_lb, pre_hinge_secrecy_rate};
use crn_core::units::dbm_to_watts;
use crn_core::{audit_evaluated, audit_solution, PowerProfile, Scenario, Trajectory};
use crn_opt::{
    optimize, solve_power, sweep_it_threshold, BcdOptions, OptError, Scheme, StopReason,
};
use crn_oracle::{
    grid_oracle_power, mc_eve_rate, mc_interference, mc_legit_rate, mc_pre_hinge_secrecy,
    probe_states,
};
use crn_solver::{SolveOptions, Status};
use schema::{LoadedScenario, SchemaError};

/// Default sampling seed for `validate`; override with `CRN_SEED`.
const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Monte-Carlo draws per probe in `validate`.
const VALIDATE_SAMPLES: usize = 20_000;
/// Probe states per scenario in `validate`.
const VALIDATE_PROBES: usize = 50;

#[derive(Parser)]
#[command(
    name = "crn",
    version,
    about = "Worst-case secrecy-rate planning for a UAV relay under primary-user \
             interference limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a scenario with one scheme and write the result files.
    Optimize {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Which blocks to optimize.
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Relative convergence tolerance; defaults to the scenario file's.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Cap on alternation rounds.
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Sweep the interference-temperature limit and record every scheme.
    SweepGamma {
        /// Scenario JSON file (its own limit is replaced by the ladder).
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated thresholds in dBm, strictly ascending.
        #[arg(long, allow_hyphen_values = true)]
        gammas_dbm: String,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check model bounds and the power solver on a scenario.
    Validate {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Audit an externally supplied solution against a scenario.
    Evaluate {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// trajectory.csv with header `slot,x_m,y_m`.
        #[arg(long)]
        trajectory: PathBuf,
        /// power.csv with header `slot,watts`.
        #[arg(long)]
        power: PathBuf,
    },
}

/// Command-line scheme tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    /// Alternate power and trajectory optimization.
    Proposed,
    /// Fixed power, fixed trajectory (no optimization).
    Fpft,
    /// Fixed power, optimized trajectory.
    Fpot,
    /// Optimized power, fixed trajectory.
    Opft,
}

impl SchemeArg {
    fn to_scheme(self) -> Scheme {
        match self {
            SchemeArg::Proposed => Scheme::Proposed,
            SchemeArg::Fpft => Scheme::Baseline,
            SchemeArg::Fpot => Scheme::TrajectoryOnly,
            SchemeArg::Opft => Scheme::PowerOnly,
        }
    }

    fn token(self) -> &'static str {
        match self {
            SchemeArg::Proposed => "proposed",
            SchemeArg::Fpft => "fpft",
            SchemeArg::Fpot => "fpot",
            SchemeArg::Opft => "opft",
        }
    }
}

/// A failure with its process exit code.
#[derive(Debug)]
enum CliError {
    /// Malformed arguments or files — exit 2.
    BadInput(String),
    /// The scenario (or supplied solution) admits no feasible answer — exit 1.
    Infeasible(String),
    /// A solver or cross-check broke down — exit 3.
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Infeasible(_) => 1,
            CliError::Failure(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::BadInput(m) | CliError::Infeasible(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(err: SchemaError) -> Self {
        match err {
            SchemaError::Format(m) => CliError::BadInput(m),
            SchemaError::Invalid(m) => CliError::Infeasible(m),
        }
    }
}

/// Map optimizer errors onto exit codes: infeasibility certificates exit 1,
/// everything else is a numerical failure.
fn classify(err: OptError) -> CliError {
    match &err {
        OptError::StartInfeasible(_) | OptError::InterferenceInfeasible { .. } => {
            CliError::Infeasible(err.to_string())
        }
        OptError::PowerSolveFailed { status } | OptError::TrajectorySolveFailed { status }
            if *status == Status::Infeasible =>
        {
            CliError::Infeasible(err.to_string())
        }
        _ => CliError::Failure(err.to_string()),
    }
}

fn io_failure(context: &str, err: std::io::Error) -> CliError {
    CliError::Failure(format!("{context}: {err}"))
}

/// Entry point shared by the binary and the tests: parse `argv` (including
/// the program name), run the command, and return the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Optimize {
            scenario,
            scheme,
            out,
            epsilon,
            max_iters,
        } => run_optimize(&scenario, scheme, &out, epsilon, max_iters),
        Command::SweepGamma {
            scenario,
            gammas_dbm,
            out,
        } => run_sweep(&scenario, &gammas_dbm, &out),
        Command::Validate { scenario } => run_validate(&scenario),
        Command::Evaluate {
            scenario,
            trajectory,
            power,
        } => run_evaluate(&scenario, &trajectory, &power),
    }
}

fn bcd_options(loaded: &LoadedScenario, epsilon: Option<f64>, max_iters: Option<usize>)
    -> Result<BcdOptions, CliError>
{
    let mut opts = BcdOptions {
        epsilon: loaded.epsilon,
        ..BcdOptions::default()
    };
    if let Some(eps) = epsilon {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(CliError::BadInput(format!(
                "--epsilon must be a positive tolerance, got {eps}"
            )));
        }
        opts.epsilon = eps;
    }
    if let Some(iters) = max_iters {
        if iters == 0 {
            return Err(CliError::BadInput("--max-iters must be at least 1".into()));
        }
        opts.max_iterations = iters;
    }
    Ok(opts)
}

fn run_optimize(
    scenario: &Path,
    scheme: SchemeArg,
    out: &Path,
    epsilon: Option<f64>,
    max_iters: Option<usize>,
) -> Result<(), CliError> {
    let loaded = schema::load_scenario(scenario)?;
    let opts = bcd_options(&loaded, epsilon, max_iters)?;
    let run = optimize(&loaded.scenario, scheme.to_scheme(), &opts).map_err(classify)?;
    let report = audit_evaluated(&run.solution, &loaded.scenario);
    emit::write_results(&run, &report, scheme.token(), out)
        .map_err(|e| io_failure("cannot write results", e))?;
    println!(
        "scheme={} wasr={} see={} iterations={} stop={}",
        scheme.token(),
        emit::fmt_f(run.solution.wasr),
        run.solution
            .see
            .map_or_else(|| "null".to_string(), emit::fmt_f),
        run.trace.iterations.len(),
        emit::stop_label(run.trace.stop),
    );
    if run.trace.stop == StopReason::BlockFailure {
        return Err(CliError::Failure(
            "a subproblem solver failed; the emitted files hold the last consistent iterate"
                .into(),
        ));
    }
    Ok(())
}

fn parse_gamma_ladder(raw: &str) -> Result<Vec<f64>, CliError> {
    let mut dbm = Vec::new();
    for part in raw.split(',') {
        let token = part.trim();
        if token.is_empty() {
            return Err(CliError::BadInput(format!(
                "--gammas-dbm has an empty entry in '{raw}'"
            )));
        }
        let v: f64 = token.parse().map_err(|_| {
            CliError::BadInput(format!("--gammas-dbm entry '{token}' is not a number"))
        })?;
        if !v.is_finite() {
            return Err(CliError::BadInput(format!(
                "--gammas-dbm entry '{token}' is not finite"
            )));
        }
        dbm.push(v);
    }
    for pair in dbm.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(CliError::BadInput(format!(
                "--gammas-dbm must be strictly ascending, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(dbm)
}

fn run_sweep(scenario: &Path, gammas_dbm: &str, out: &Path) -> Result<(), CliError> {
    let loaded = schema::load_scenario(scenario)?;
    let ladder_w: Vec<f64> = parse_gamma_ladder(gammas_dbm)?
        .into_iter()
        .map(dbm_to_watts)
        .collect();
    let opts = bcd_options(&loaded, None, None)?;
    let curves = sweep_it_threshold(&loaded.scenario, &ladder_w, &opts).map_err(classify)?;
    std::fs::create_dir_all(out).map_err(|e| io_failure("cannot create output directory", e))?;
    std::fs::write(out.join("sweep.csv"), emit::sweep_csv(&curves))
        .map_err(|e| io_failure("cannot write sweep.csv", e))?;
    println!(
        "swept {} thresholds; proposed wasr {} .. {}",
        curves.gammas.len(),
        emit::fmt_f(curves.proposed[0]),
        emit::fmt_f(*curves.proposed.last().expect("nonempty ladder")),
    );
    Ok(())
}

fn run_evaluate(scenario: &Path, trajectory: &Path, power: &Path) -> Result<(), CliError> {
    let loaded = schema::load_scenario(scenario)?;
    let scen = &loaded.scenario;
    let traj_text = std::fs::read_to_string(trajectory).map_err(|e| {
        CliError::BadInput(format!("cannot read {}: {e}", trajectory.display()))
    })?;
    let power_text = std::fs::read_to_string(power)
        .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", power.display())))?;
    let points = emit::parse_trajectory_csv(&traj_text)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", trajectory.display())))?;
    let watts = emit::parse_power_csv(&power_text)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", power.display())))?;
    if points.len() != scen.n_slots || watts.len() != scen.n_slots {
        return Err(CliError::BadInput(format!(
            "scenario has {} slots but the files provide {} trajectory rows and {} power rows",
            scen.n_slots,
            points.len(),
            watts.len()
        )));
    }
    let (sol, report) = audit_solution(
        &Trajectory::new(points),
        &PowerProfile::new(watts),
        scen,
    )
    .map_err(|e| CliError::Infeasible(format!("solution cannot be scored: {e}")))?;
    print!("{}", emit::eval_summary_json(&sol, &report));
    if !report.is_feasible_default() {
        return Err(CliError::Infeasible(format!(
            "solution violates the scenario constraints (max residual {})",
            emit::fmt_f(report.max_violation())
        )));
    }
    Ok(())
}

fn run_validate(scenario: &Path) -> Result<(), CliError> {
    let loaded = schema::load_scenario(scenario)?;
    let seed = match std::env::var("CRN_SEED") {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
            CliError::BadInput(format!("CRN_SEED must be an unsigned integer, got '{raw}'"))
        })?,
        Err(_) => DEFAULT_SEED,
    };
    let mut failures = 0usize;
    let mut check = |name: &str, outcome: Result<(), String>| match outcome {
        Ok(()) => println!("PASS {name}"),
        Err(msg) => {
            failures += 1;
            println!("FAIL {name}: {msg}");
        }
    };

    check("scenario file round-trip", check_round_trip(&loaded));
    check(
        "legitimate-rate lower bound vs Monte-Carlo",
        check_legit_bound(&loaded.scenario, seed),
    );
    check(
        "eavesdropper-rate upper bound vs Monte-Carlo",
        check_eve_bound(&loaded.scenario, seed),
    );
    check(
        "interference upper bound vs Monte-Carlo",
        check_interference_bound(&loaded.scenario, seed),
    );
    check(
        "secrecy-rate lower bound vs Monte-Carlo",
        check_secrecy_bound(&loaded.scenario, seed),
    );
    check(
        "power solver vs exhaustive grid",
        check_power_grid(&loaded.scenario),
    );

    if failures == 0 {
        println!(
            "all checks passed (seed {seed}, {VALIDATE_PROBES} probes, \
             {VALIDATE_SAMPLES} samples)"
        );
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "{failures} validation check(s) failed"
        )))
    }
}

fn check_round_trip(loaded: &LoadedScenario) -> Result<(), String> {
    let rewritten = schema::ScenarioFile::from_parts(loaded).to_json();
    let reloaded = schema::ScenarioFile::from_json(&rewritten)
        .map_err(|e| e.to_string())?
        .into_parts()
        .map_err(|e| e.to_string())?;
    let a = &loaded.scenario;
    let b = &reloaded.scenario;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300);
    let ok = a.users == b.users
        && a.primaries == b.primaries
        && a.n_slots == b.n_slots
        && close(a.radio.beta0, b.radio.beta0)
        && close(a.radio.sigma2, b.radio.sigma2)
        && a.gamma_it
            .iter()
            .zip(&b.gamma_it)
            .all(|(x, y)| close(*x, *y));
    if ok {
        Ok(())
    } else {
        Err("rewriting the scenario changed a field by more than 1e-12 relative".into())
    }
}

fn check_legit_bound(scen: &Scenario, seed: u64) -> Result<(), String> {
    for (i, &(q, p)) in probe_states(scen, VALIDATE_PROBES, seed).iter().enumerate() {
        let bound = legit_rate_lb(q, p, scen).map_err(|e| e.to_string())?;
        let est = mc_legit_rate(q, p, scen, VALIDATE_SAMPLES, seed.wrapping_add(i as u64));
        if bound > est.mean + 3.0 * est.std_err {
            return Err(format!(
                "probe {i}: bound {bound} exceeds sampled mean {} + 3*{}",
                est.mean, est.std_err
            ));
        }
    }
    Ok(())
}

fn check_eve_bound(scen: &Scenario, seed: u64) -> Result<(), String> {
    for (i, &(q, p)) in probe_states(scen, VALIDATE_PROBES, seed).iter().enumerate() {
        let bound = eve_rate(q, p, scen).map_err(|e| e.to_string())?;
        let est = mc_eve_rate(q, p, scen, VALIDATE_SAMPLES, seed.wrapping_add(i as u64));
        if est.max > bound + 1e-12 * (1.0 + bound.abs()) {
            return Err(format!(
                "probe {i}: sampled max {} exceeds worst-case bound {bound}",
                est.max
            ));
        }
    }
    Ok(())
}

fn check_interference_bound(scen: &Scenario, seed: u64) -> Result<(), String> {
    for (i, &(q, p)) in probe_states(scen, VALIDATE_PROBES, seed).iter().enumerate() {
        for r in 0..scen.num_primaries() {
            let bound = interference_bound(q, p, scen, r).map_err(|e| e.to_string())?;
            let est = mc_interference(
                q,
                p,
                scen,
                r,
                VALIDATE_SAMPLES,
                seed.wrapping_add((i * scen.num_primaries() + r) as u64),
            );
            if est.mean - 3.0 * est.std_err > bound * (1.0 + 1e-12) {
                return Err(format!(
                    "probe {i}, primary {r}: sampled mean {} - 3*{} exceeds bound {bound}",
                    est.mean, est.std_err
                ));
            }
        }
    }
    Ok(())
}

fn check_secrecy_bound(scen: &Scenario, seed: u64) -> Result<(), String> {
    for (i, &(q, p)) in probe_states(scen, VALIDATE_PROBES, seed).iter().enumerate() {
        let bound = pre_hinge_secrecy_rate(q, p, scen).map_err(|e| e.to_string())?;
        let est = mc_pre_hinge_secrecy(q, p, scen, VALIDATE_SAMPLES, seed.wrapping_add(i as u64));
        if bound > est.mean + 3.0 * est.std_err {
            return Err(format!(
                "probe {i}: bound {bound} exceeds sampled mean {} + 3*{}",
                est.mean, est.std_err
            ));
        }
    }
    Ok(())
}

/// Restrict the scenario to its first three straight-line hover points and
/// compare the convex power solver against an exhaustive per-slot grid.
fn check_power_grid(scen: &Scenario) -> Result<(), String> {
    let full = Trajectory::straight_line(scen.q_start, scen.q_end, scen.n_slots);
    let take = scen.n_slots.min(3);
    let mut small = scen.clone();
    small.n_slots = take;
    small.q_start = full.points[0];
    small.q_end = full.points[take - 1];
    let traj = Trajectory::new(full.points[..take].to_vec());

    let cache = small.build_cache().map_err(|e| e.to_string())?;
    let opts = SolveOptions::default();
    let mut power = PowerProfile::uniform(0.5 * small.p_max, take);
    for _ in 0..200 {
        let out = solve_power(&traj, &power, &small, &cache, &opts)
            .map_err(|e| e.to_string())?;
        let step: f64 = out
            .power
            .watts
            .iter()
            .zip(&power.watts)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        power = out.power;
        if step < 1e-10 * small.p_max {
            break;
        }
    }
    let solver_wasr = crn_core::evaluate_solution(&traj, &power, &small)
        .map_err(|e| e.to_string())?
        .wasr;

    let points = 201;
    let best = grid_oracle_power(&traj, &small, points)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| "no feasible power allocation exists on the restricted slots".to_string())?;

    // The grid can miss the true optimum by at most one lattice spacing per
    // slot; the hinged rate's slope in power is below a / ln 2.
    let coeffs =
        crn_opt::build_power_coeffs(&traj, &small, &cache).map_err(|e| e.to_string())?;
    let spacing = small.p_max / (points - 1) as f64;
    let slack: f64 = coeffs
        .a
        .iter()
        .map(|a| a * spacing / std::f64::consts::LN_2)
        .sum::<f64>()
        / take as f64
        + 1e-9;
    if (solver_wasr - best.wasr).abs() > slack {
        return Err(format!(
            "solver objective {solver_wasr} vs grid {} (allowed slack {slack})",
            best.wasr
        ));
    }
    Ok(())
}
