//! Independent validation oracles for the worst-case secrecy model.
//!
//! The optimizer stack reasons entirely through analytic bounds: a Jensen
//! lower bound on the legitimate rate, disc-closest-point upper bounds on
//! everything the eavesdroppers do, and mean-fading upper bounds on the
//! interference seen by primary receivers. This crate re-derives those claims
//! by brute force, sharing no code path with the bounds themselves:
//!
//! * [`fading`] — deterministic samplers for the random channel elements
//!   (unit-mean exponential fading, uniform positions inside uncertainty
//!   discs).
//! * [`mc`] — Monte-Carlo estimates of the *true* sampled rates and
//!   interference, with standard errors, so each bound can be checked for
//!   directional soundness against physics it never saw.
//! * [`grid`] — exhaustive searches over discretized feasible sets of small
//!   instances, used to certify the subproblem solvers against the global
//!   optimum and BCD outputs against single-slot local moves.

pub mod fading;
pub mod grid;
pub mod mc;

pub use fading::FadingSampler;
pub use grid::{grid_oracle_power, grid_oracle_trajectory, GridPower, SlotImprovement};
pub use mc::{
    mc_eve_rate, mc_interference, mc_legit_rate, mc_pre_hinge_secrecy, probe_states, McEstimate,
};
