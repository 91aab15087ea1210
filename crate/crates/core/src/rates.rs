//! Per-slot rates and interference bounds.
//!
//! All rates are spectral efficiencies (bits/s/Hz). The legitimate rate is a
//! Jensen *lower* bound (fading expectation moved into the SINR denominator),
//! the eavesdropping rate is a worst-case *upper* bound (colluding receivers,
//! disc-closest positions), and the interference bound is a worst-case upper
//! bound on the per-slot interference power at a primary receiver. Their
//! difference, clamped at zero, is therefore a sound worst-case secrecy rate.

use crate::channel::{a2g_gain, worst_case_eve_gain};
use crate::error::ModelError;
use crate::geometry::Point2;
use crate::types::{Scenario, ScenarioCache};

/// Lower bound on the cooperative (MRC) decoding rate of the user group when
/// the UAV transmits `p` Watts above `q`.
pub fn legit_rate_lb(q: Point2, p: f64, scen: &Scenario) -> Result<f64, ModelError> {
    let cache = scen.build_cache()?;
    Ok(legit_rate_lb_cached(q, p, scen, &cache))
}

/// As [`legit_rate_lb`] with a prebuilt cache (hot path for optimizers).
pub fn legit_rate_lb_cached(q: Point2, p: f64, scen: &Scenario, cache: &ScenarioCache) -> f64 {
    let mut sinr = 0.0;
    for (k, &w) in scen.users.iter().enumerate() {
        let h = a2g_gain(q, w, scen.altitude, &scen.radio);
        sinr += p * h / cache.g2g_denom[k];
    }
    (1.0 + sinr).log2()
}

/// Worst-case rate of the colluding eavesdroppers (sum of per-eavesdropper
/// SNRs inside a single logarithm; their jamming is self-cancelled).
pub fn eve_rate(q: Point2, p: f64, scen: &Scenario) -> Result<f64, ModelError> {
    let mut snr = 0.0;
    for (m, eve) in scen.eves.iter().enumerate() {
        let g = worst_case_eve_gain(q, eve, scen.altitude, &scen.radio, m)?;
        snr += p * g / scen.radio.sigma2;
    }
    Ok((1.0 + snr).log2())
}

/// Legitimate lower bound minus eavesdropping upper bound, *without* the
/// hinge at zero. Negative values mean the slot leaks more than it delivers.
pub fn pre_hinge_secrecy_rate(q: Point2, p: f64, scen: &Scenario) -> Result<f64, ModelError> {
    let cache = scen.build_cache()?;
    pre_hinge_secrecy_rate_cached(q, p, scen, &cache)
}

/// As [`pre_hinge_secrecy_rate`] with a prebuilt cache.
pub fn pre_hinge_secrecy_rate_cached(
    q: Point2,
    p: f64,
    scen: &Scenario,
    cache: &ScenarioCache,
) -> Result<f64, ModelError> {
    Ok(legit_rate_lb_cached(q, p, scen, cache) - eve_rate(q, p, scen)?)
}

/// Worst-case per-slot secrecy rate `[legit - eve]^+`.
pub fn secrecy_rate(q: Point2, p: f64, scen: &Scenario) -> Result<f64, ModelError> {
    Ok(pre_hinge_secrecy_rate(q, p, scen)?.max(0.0))
}

/// Upper bound on the interference power (Watts) received by primary `r`
/// during a slot: UAV contribution plus the constant worst-case mean jamming
/// from the eavesdroppers.
pub fn interference_bound(
    q: Point2,
    p: f64,
    scen: &Scenario,
    r: usize,
) -> Result<f64, ModelError> {
    let cache = scen.build_cache()?;
    Ok(interference_bound_cached(q, p, scen, &cache, r))
}

/// As [`interference_bound`] with a prebuilt cache.
pub fn interference_bound_cached(
    q: Point2,
    p: f64,
    scen: &Scenario,
    cache: &ScenarioCache,
    r: usize,
) -> f64 {
    p * a2g_gain(q, scen.primaries[r], scen.altitude, &scen.radio) + cache.jam_const[r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{EveEstimate, RadioConstants};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// One user directly below the UAV, one distant eavesdropper, no jamming.
    fn single_user_scenario() -> Scenario {
        Scenario {
            users: vec![Point2::new(0.0, 0.0)],
            primaries: vec![Point2::new(0.0, 0.0)],
            eves: vec![EveEstimate {
                pos_est: Point2::new(1000.0, 0.0),
                radius: 10.0,
            }],
            altitude: 100.0,
            q_start: Point2::new(0.0, 0.0),
            q_end: Point2::new(0.0, 0.0),
            n_slots: 1,
            slot_len: 1.0,
            v_max: 60.0,
            p_max: 3.0,
            gamma_it: vec![1e-11],
            see_min: 0.0,
            radio: RadioConstants {
                beta0: 1e-6,
                sigma2: 1e-14,
                alpha: 2.2,
                pe: 0.0,
            },
        }
    }

    #[test]
    fn legit_rate_single_user_overhead() {
        // SNR = 3 * 1e-10 / 1e-14 = 3e4 -> log2(1 + 3e4) ~ 14.873.
        let s = single_user_scenario();
        let r = legit_rate_lb(Point2::new(0.0, 0.0), 3.0, &s).unwrap();
        assert!(rel(r, (1.0_f64 + 3e4).log2()) < 1e-12);
        assert!((r - 14.8729).abs() < 1e-3);
    }

    #[test]
    fn legit_rate_zero_power_is_zero() {
        let s = single_user_scenario();
        assert_eq!(legit_rate_lb(Point2::new(7.0, -2.0), 0.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn eve_rate_single_eve() {
        // Worst-case gain 1e-10 at p = 1 -> log2(1 + 1e4) ~ 13.288.
        let mut s = single_user_scenario();
        s.eves[0] = EveEstimate {
            pos_est: Point2::new(10.0, 0.0),
            radius: 10.0,
        };
        let r = eve_rate(Point2::new(0.0, 0.0), 1.0, &s).unwrap();
        assert!(rel(r, (1.0_f64 + 1e4).log2()) < 1e-12);
        assert!((r - 13.2879).abs() < 1e-3);
    }

    #[test]
    fn eve_rate_two_identical_eves_sum_inside_log() {
        let mut s = single_user_scenario();
        s.eves = vec![
            EveEstimate {
                pos_est: Point2::new(10.0, 0.0),
                radius: 10.0,
            };
            2
        ];
        let r = eve_rate(Point2::new(0.0, 0.0), 1.0, &s).unwrap();
        assert!(rel(r, (1.0_f64 + 2e4).log2()) < 1e-12);
    }

    #[test]
    fn secrecy_rate_worked_difference() {
        // legit log2(1+3e4) at p=3 minus eve log2(1+3e4 * gain ratio)...
        // Use the two frozen cases: overhead user at p=3 and boundary eve at
        // p=3: eve worst gain 1e-10 -> same SNR -> secrecy exactly 0.
        let mut s = single_user_scenario();
        s.eves[0] = EveEstimate {
            pos_est: Point2::new(10.0, 0.0),
            radius: 10.0,
        };
        let r = secrecy_rate(Point2::new(0.0, 0.0), 3.0, &s).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn secrecy_rate_positive_case() {
        // Eve 110 m out (worst 100 m): gain 5e-11, user overhead 1e-10.
        // p = 3: legit = log2(1+3e4), eve = log2(1+1.5e4),
        // secrecy ~ log2(30001/15001) ~ 1.0.
        let mut s = single_user_scenario();
        s.eves[0] = EveEstimate {
            pos_est: Point2::new(110.0, 0.0),
            radius: 10.0,
        };
        let r = secrecy_rate(Point2::new(0.0, 0.0), 3.0, &s).unwrap();
        let expected = (1.0_f64 + 3e4).log2() - (1.0_f64 + 1.5e4).log2();
        assert!(rel(r, expected) < 1e-12);
    }

    #[test]
    fn hinge_clamps_negative_slots() {
        // UAV parked next to the eavesdropper, far from the user.
        let mut s = single_user_scenario();
        s.eves[0] = EveEstimate {
            pos_est: Point2::new(1000.0, 0.0),
            radius: 10.0,
        };
        let q = Point2::new(1010.0, 0.0);
        let pre = pre_hinge_secrecy_rate(q, 1.0, &s).unwrap();
        assert!(pre < 0.0);
        assert_eq!(secrecy_rate(q, 1.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn interference_bound_overhead_no_jamming() {
        let s = single_user_scenario();
        let i = interference_bound(Point2::new(0.0, 0.0), 1.0, &s, 0).unwrap();
        assert!(rel(i, 1e-10) < 1e-12);
    }

    #[test]
    fn interference_bound_adds_constant_jamming() {
        let mut s = single_user_scenario();
        s.radio.pe = 0.1;
        // Primary at origin, eve disc closest point at 990 m.
        let jam = 0.1 * 1e-6 * 990f64.powf(-2.2);
        let i = interference_bound(Point2::new(0.0, 0.0), 1.0, &s, 0).unwrap();
        assert!(rel(i, 1e-10 + jam) < 1e-12);
    }

    #[test]
    fn jamming_raises_denominator_and_lowers_rate() {
        let mut s = single_user_scenario();
        let clean = legit_rate_lb(Point2::new(0.0, 0.0), 1.0, &s).unwrap();
        s.radio.pe = 0.1;
        let jammed = legit_rate_lb(Point2::new(0.0, 0.0), 1.0, &s).unwrap();
        assert!(jammed < clean);
    }
}
