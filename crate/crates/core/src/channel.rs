//! Channel gain primitives.
//!
//! Three link families appear in the model:
//!
//! * **Air-to-ground (LoS):** gain `beta0 / (||q - w||^2 + H^2)` between the
//!   UAV's ground projection `q` and a ground node `w`.
//! * **UAV-to-eavesdropper, worst case:** the eavesdropper's true position is
//!   unknown within a disc of radius `r`, so the gain is evaluated at the
//!   closest point of the disc, `beta0 / ((d_hat - r)^2 + H^2)` with
//!   `d_hat = ||q - w_hat|| >= r`.
//! * **Ground-to-ground (Rayleigh):** unit-mean exponential fading over
//!   path loss `beta0 * A^(-alpha)`; under the worst case the separation `A`
//!   is shortened by the uncertainty radius: `A = | ||w - w_hat|| - r |`.
//!   This module exposes the *mean* coefficient (the fading expectation is 1).

use crate::consts::EPS_DIST;
use crate::error::ModelError;
use crate::geometry::Point2;
use crate::types::{EveEstimate, RadioConstants};

/// Line-of-sight air-to-ground channel power gain between the UAV above `q`
/// (altitude `h`) and the ground node at `w`.
pub fn a2g_gain(q: Point2, w: Point2, h: f64, radio: &RadioConstants) -> f64 {
    radio.beta0 / (q.dist_sq(w) + h * h)
}

/// Worst-case (disc-closest-point) UAV-to-eavesdropper gain.
///
/// Errors when `q` lies strictly inside the uncertainty disc: there is then
/// no meaningful worst-case ground separation.
pub fn worst_case_eve_gain(
    q: Point2,
    eve: &EveEstimate,
    h: f64,
    radio: &RadioConstants,
    eve_idx: usize,
) -> Result<f64, ModelError> {
    let d_hat = q.dist(eve.pos_est);
    if d_hat < eve.radius {
        return Err(ModelError::EveExclusionViolated {
            eve: eve_idx,
            x: q.x,
            y: q.y,
            dist: d_hat,
            radius: eve.radius,
        });
    }
    let worst = d_hat - eve.radius;
    Ok(radio.beta0 / (worst * worst + h * h))
}

/// Mean worst-case ground-to-ground gain coefficient
/// `beta0 * A^(-alpha)` between a ground node at `w` and the eavesdropper
/// disc, with `A = | ||w - w_hat|| - r |` the closest the eavesdropper can
/// sit to the node.
///
/// `eve_idx` / `node_idx` only label the error (node index within its own
/// family: user or primary). Errors when `A` is numerically zero, since
/// `A^(-alpha)` then blows up.
pub fn worst_case_g2g_gain_coeff(
    w: Point2,
    eve: &EveEstimate,
    radio: &RadioConstants,
    eve_idx: usize,
    node_idx: usize,
) -> Result<f64, ModelError> {
    let a = (w.dist(eve.pos_est) - eve.radius).abs();
    if a <= EPS_DIST {
        return Err(ModelError::DegenerateDistance {
            eve: eve_idx,
            node: node_idx,
            dist: a,
            eps: EPS_DIST,
        });
    }
    Ok(radio.beta0 * a.powf(-radio.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radio() -> RadioConstants {
        RadioConstants {
            beta0: 1e-6,
            sigma2: 1e-14,
            alpha: 2.2,
            pe: 0.0,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn a2g_gain_overhead() {
        // Directly overhead at 100 m: beta0 / H^2 = 1e-10.
        let g = a2g_gain(Point2::new(5.0, -3.0), Point2::new(5.0, -3.0), 100.0, &radio());
        assert!(rel(g, 1e-10) < 1e-12);
    }

    #[test]
    fn a2g_gain_offset() {
        // 100 m horizontal offset doubles the squared distance: 5e-11.
        let g = a2g_gain(Point2::new(100.0, 0.0), Point2::new(0.0, 0.0), 100.0, &radio());
        assert!(rel(g, 5e-11) < 1e-12);
    }

    #[test]
    fn eve_gain_uses_disc_closest_point() {
        // d_hat = 110, r = 10 -> worst distance 100 -> beta0 / (1e4 + 1e4).
        let eve = EveEstimate {
            pos_est: Point2::new(110.0, 0.0),
            radius: 10.0,
        };
        let g = worst_case_eve_gain(Point2::new(0.0, 0.0), &eve, 100.0, &radio(), 0).unwrap();
        assert!(rel(g, 5e-11) < 1e-12);
    }

    #[test]
    fn eve_gain_on_disc_boundary_is_overhead_gain() {
        let eve = EveEstimate {
            pos_est: Point2::new(10.0, 0.0),
            radius: 10.0,
        };
        let g = worst_case_eve_gain(Point2::new(0.0, 0.0), &eve, 100.0, &radio(), 0).unwrap();
        assert!(rel(g, 1e-10) < 1e-12);
    }

    #[test]
    fn eve_gain_rejects_interior_points() {
        let eve = EveEstimate {
            pos_est: Point2::new(5.0, 0.0),
            radius: 10.0,
        };
        let err = worst_case_eve_gain(Point2::new(0.0, 0.0), &eve, 100.0, &radio(), 3).unwrap_err();
        match err {
            ModelError::EveExclusionViolated { eve, dist, .. } => {
                assert_eq!(eve, 3);
                assert!((dist - 5.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn g2g_coeff_unit_distance() {
        // ||w - w_hat|| = 1 + r -> A = 1 -> coefficient beta0.
        let eve = EveEstimate {
            pos_est: Point2::new(11.0, 0.0),
            radius: 10.0,
        };
        let c = worst_case_g2g_gain_coeff(Point2::new(0.0, 0.0), &eve, &radio(), 0, 0).unwrap();
        assert!(rel(c, 1e-6) < 1e-12);
    }

    #[test]
    fn g2g_coeff_hundred_meters() {
        // A = 100 -> beta0 * 100^-2.2 = 1e-6 * 10^-4.4.
        let eve = EveEstimate {
            pos_est: Point2::new(110.0, 0.0),
            radius: 10.0,
        };
        let c = worst_case_g2g_gain_coeff(Point2::new(0.0, 0.0), &eve, &radio(), 0, 0).unwrap();
        let expected = 1e-6 * 100f64.powf(-2.2);
        assert!(rel(c, expected) < 1e-12);
        assert!(rel(c, 3.9810717055349694e-11) < 1e-10);
    }

    #[test]
    fn g2g_coeff_rejects_degenerate_distance() {
        // Node exactly on the disc boundary: A = 0.
        let eve = EveEstimate {
            pos_est: Point2::new(10.0, 0.0),
            radius: 10.0,
        };
        let err =
            worst_case_g2g_gain_coeff(Point2::new(0.0, 0.0), &eve, &radio(), 1, 2).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DegenerateDistance { eve: 1, node: 2, .. }
        ));
    }

    #[test]
    fn g2g_coeff_node_inside_disc_uses_absolute_shortfall() {
        // ||w - w_hat|| = 4, r = 10 -> A = |4 - 10| = 6.
        let eve = EveEstimate {
            pos_est: Point2::new(4.0, 0.0),
            radius: 10.0,
        };
        let c = worst_case_g2g_gain_coeff(Point2::new(0.0, 0.0), &eve, &radio(), 0, 0).unwrap();
        assert!(rel(c, 1e-6 * 6f64.powf(-2.2)) < 1e-12);
    }
}
