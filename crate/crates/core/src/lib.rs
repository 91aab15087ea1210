//! Domain model for secrecy-aware UAV transmission planning in an underlay
//! cognitive radio network.
//!
//! A rotary-wing UAV (`S`) flies a discretized 2-D trajectory at fixed
//! altitude and broadcasts to `K` ground users that decode cooperatively
//! (maximal-ratio combining). `M` full-duplex eavesdroppers with imperfectly
//! known positions overhear the downlink while jamming the users, and `R`
//! primary receivers tolerate at most a per-receiver time-averaged
//! interference temperature. This crate holds the shared data types and
//! evaluates every closed-form quantity of that model:
//!
//! * air-to-ground and worst-case ground channel gains ([`channel`]),
//! * the Jensen-bounded legitimate rate, the worst-case colluding
//!   eavesdropping rate, and the per-slot worst-case secrecy rate
//!   ([`rates`]),
//! * the interference-temperature upper bound at each primary receiver,
//! * whole-solution scoring and feasibility audits ([`solution`], [`audit`]).
//!
//! All quantities are SI internally (meters, Watts, W/Hz); dB / dBm appear
//! only in the conversion helpers of [`units`]. Everything here is
//! deterministic and allocation-light; the optimization layers build on these
//! primitives but never duplicate them.

pub mod audit;
pub mod channel;
pub mod consts;
pub mod error;
pub mod geometry;
pub mod rates;
pub mod solution;
pub mod types;
pub mod units;

pub use audit::{audit_evaluated, audit_solution, FeasibilityReport};
pub use error::ModelError;
pub use geometry::Point2;
pub use rates::{
    eve_rate, interference_bound, legit_rate_lb, pre_hinge_secrecy_rate, secrecy_rate,
};
pub use solution::{evaluate_solution, SlotDiagnostics, Solution};
pub use types::{EveEstimate, PowerProfile, RadioConstants, Scenario, ScenarioCache, Trajectory};
