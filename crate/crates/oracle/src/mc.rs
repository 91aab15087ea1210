//! Monte-Carlo estimates of the true sampled network quantities.
//!
//! The model never evaluates the network it actually flies over: it scores a
//! *bound* built from worst-case eavesdropper positions and mean fading. The
//! estimators here sample the underlying randomness directly — uniform true
//! positions inside each uncertainty disc, independent unit-mean exponential
//! fading per ground link — and report the resulting sample statistics.
//!
//! Soundness is directional, so each bound pairs with one check (all assume
//! the ground nodes sit outside every uncertainty disc, as any meaningful
//! deployment does):
//!
//! * legitimate rate: the modeled value is a *lower* bound, so the sampled
//!   mean may not fall more than sampling noise below it;
//! * eavesdropping rate: the modeled value is a *worst-case upper* bound, so
//!   it must dominate every single sample, not just the mean;
//! * interference at a primary: the modeled value upper-bounds the *mean*
//!   (fading is unbounded, so single samples may exceed it);
//! * pre-clamp secrecy rate: lower bound of the sampled mean, combining the
//!   first two directions.

use crn_core::channel::a2g_gain;
use crn_core::consts::EPS_DIST;
use crn_core::{Point2, Scenario};

use crate::fading::FadingSampler;

/// Distinct draw streams per estimator, so estimates never alias even when
/// callers reuse one seed across all four.
const STREAM_LEGIT: u64 = 1;
const STREAM_EVE: u64 = 2;
const STREAM_INTERFERENCE: u64 = 3;
const STREAM_SECRECY: u64 = 4;
const STREAM_PROBES: u64 = 5;

/// Summary statistics of one Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample mean.
    pub mean: f64,
    /// Standard error of the mean.
    pub std_err: f64,
    /// Largest sample.
    pub max: f64,
    /// Smallest sample.
    pub min: f64,
    /// Number of samples.
    pub samples: usize,
}

/// Streaming accumulator for mean / standard error / extremes (Welford's
/// update, so near-constant samples don't suffer cancellation).
struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
    max: f64,
    min: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            n: 0,
            mean: 0.0,
            m2: 0.0,
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
        }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        self.max = self.max.max(x);
        self.min = self.min.min(x);
    }

    fn finish(self) -> McEstimate {
        assert!(self.n >= 2, "need at least two samples, got {}", self.n);
        let n = self.n as f64;
        let var = (self.m2 / (n - 1.0)).max(0.0);
        McEstimate {
            mean: self.mean,
            std_err: (var / n).sqrt(),
            max: self.max,
            min: self.min,
            samples: self.n,
        }
    }
}

/// One draw of true eavesdropper positions, uniform in each disc.
fn sample_eve_positions(scen: &Scenario, sampler: &mut FadingSampler) -> Vec<Point2> {
    scen.eves
        .iter()
        .map(|e| sampler.uniform_disc(e.pos_est, e.radius))
        .collect()
}

/// Sampled jamming power received by the ground node at `w` from
/// eavesdroppers at `eves`, with fresh fading per link. Ground separations
/// are clamped at [`EPS_DIST`] to keep the path loss finite.
fn sampled_jamming(
    w: Point2,
    eves: &[Point2],
    scen: &Scenario,
    sampler: &mut FadingSampler,
) -> f64 {
    let radio = &scen.radio;
    let mut jam = 0.0;
    for &e in eves {
        let a = w.dist(e).max(EPS_DIST);
        jam += radio.pe * radio.beta0 * a.powf(-radio.alpha) * sampler.unit_exp();
    }
    jam
}

/// Sampled cooperative decoding rate of the user group: true eavesdropper
/// positions per sample, independent fading on every jamming link.
fn sampled_legit_rate(
    q: Point2,
    p: f64,
    scen: &Scenario,
    eves: &[Point2],
    sampler: &mut FadingSampler,
) -> f64 {
    let jamming = scen.radio.pe > 0.0;
    let mut sinr = 0.0;
    for &w in &scen.users {
        let jam = if jamming {
            sampled_jamming(w, eves, scen, sampler)
        } else {
            0.0
        };
        let h = a2g_gain(q, w, scen.altitude, &scen.radio);
        sinr += p * h / (scen.radio.sigma2 + jam);
    }
    (1.0 + sinr).log2()
}

/// Sampled colluding eavesdropping rate at true positions (line-of-sight
/// links: deterministic given the positions).
fn sampled_eve_rate(q: Point2, p: f64, scen: &Scenario, eves: &[Point2]) -> f64 {
    let radio = &scen.radio;
    let h2 = scen.altitude * scen.altitude;
    let mut snr = 0.0;
    for &e in eves {
        let gain = radio.beta0 / (q.dist_sq(e) + h2);
        snr += p * gain / radio.sigma2;
    }
    (1.0 + snr).log2()
}

/// Monte-Carlo estimate of the true cooperative decoding rate when the UAV
/// transmits `p` Watts above `q`. The modeled legitimate rate is a lower
/// bound of this estimate's mean.
pub fn mc_legit_rate(q: Point2, p: f64, scen: &Scenario, samples: usize, seed: u64) -> McEstimate {
    let mut sampler = FadingSampler::new(seed, STREAM_LEGIT);
    let mut acc = Accumulator::new();
    for _ in 0..samples {
        let eves = sample_eve_positions(scen, &mut sampler);
        acc.push(sampled_legit_rate(q, p, scen, &eves, &mut sampler));
    }
    acc.finish()
}

/// Monte-Carlo estimate of the colluding eavesdropping rate at sampled true
/// positions. The modeled worst-case rate dominates every sample, so check
/// `max`, not just `mean`.
pub fn mc_eve_rate(q: Point2, p: f64, scen: &Scenario, samples: usize, seed: u64) -> McEstimate {
    let mut sampler = FadingSampler::new(seed, STREAM_EVE);
    let mut acc = Accumulator::new();
    for _ in 0..samples {
        let eves = sample_eve_positions(scen, &mut sampler);
        acc.push(sampled_eve_rate(q, p, scen, &eves));
    }
    acc.finish()
}

/// Monte-Carlo estimate of the interference power received by primary `r`:
/// the deterministic UAV term plus sampled jamming (true positions, fresh
/// fading). The modeled bound dominates the mean; single samples may exceed
/// it because fading is unbounded.
pub fn mc_interference(
    q: Point2,
    p: f64,
    scen: &Scenario,
    r: usize,
    samples: usize,
    seed: u64,
) -> McEstimate {
    let mut sampler = FadingSampler::new(seed, STREAM_INTERFERENCE);
    let w = scen.primaries[r];
    let uav = p * a2g_gain(q, w, scen.altitude, &scen.radio);
    let jamming = scen.radio.pe > 0.0;
    let mut acc = Accumulator::new();
    for _ in 0..samples {
        let jam = if jamming {
            let eves = sample_eve_positions(scen, &mut sampler);
            sampled_jamming(w, &eves, scen, &mut sampler)
        } else {
            0.0
        };
        acc.push(uav + jam);
    }
    acc.finish()
}

/// Monte-Carlo estimate of the true pre-clamp secrecy rate: sampled
/// legitimate rate minus the colluding rate at the *same* sampled positions.
/// The modeled pre-clamp rate is a lower bound of this estimate's mean.
pub fn mc_pre_hinge_secrecy(
    q: Point2,
    p: f64,
    scen: &Scenario,
    samples: usize,
    seed: u64,
) -> McEstimate {
    let mut sampler = FadingSampler::new(seed, STREAM_SECRECY);
    let mut acc = Accumulator::new();
    for _ in 0..samples {
        let eves = sample_eve_positions(scen, &mut sampler);
        let legit = sampled_legit_rate(q, p, scen, &eves, &mut sampler);
        let eve = sampled_eve_rate(q, p, scen, &eves);
        acc.push(legit - eve);
    }
    acc.finish()
}

/// Deterministic random probe states `(q, p)` for bound validation: ground
/// positions drawn from the scenario's padded bounding box, kept at least
/// one meter clear of every uncertainty disc, with powers in
/// `[0.05, 1.0] * p_max` so rates never degenerate to all-zero.
pub fn probe_states(scen: &Scenario, count: usize, seed: u64) -> Vec<(Point2, f64)> {
    let mut sampler = FadingSampler::new(seed, STREAM_PROBES);
    let mut xs: Vec<f64> = vec![scen.q_start.x, scen.q_end.x];
    let mut ys: Vec<f64> = vec![scen.q_start.y, scen.q_end.y];
    for &w in scen.users.iter().chain(&scen.primaries) {
        xs.push(w.x);
        ys.push(w.y);
    }
    for e in &scen.eves {
        xs.push(e.pos_est.x);
        ys.push(e.pos_est.y);
    }
    let pad = 100.0;
    let (x_lo, x_hi) = bounds(&xs, pad);
    let (y_lo, y_hi) = bounds(&ys, pad);

    let mut probes = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while probes.len() < count {
        attempts += 1;
        assert!(
            attempts < 10_000 * (count + 1),
            "probe sampling starved: the uncertainty discs cover the scenario box"
        );
        let q = Point2::new(sampler.uniform(x_lo, x_hi), sampler.uniform(y_lo, y_hi));
        if scen
            .eves
            .iter()
            .any(|e| q.dist(e.pos_est) < e.radius + 1.0)
        {
            continue;
        }
        let p = sampler.uniform(0.05 * scen.p_max, scen.p_max);
        probes.push((q, p));
    }
    probes
}

fn bounds(values: &[f64], pad: f64) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - pad, hi + pad)
}
