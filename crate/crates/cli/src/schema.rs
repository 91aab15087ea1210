//! On-disk scenario format.
//!
//! Scenario files are JSON documents that describe node geometry in metres,
//! radio quantities in conventional log units (dB / dBm), and the mission
//! horizon in seconds.  [`ScenarioFile`] mirrors that layout field by field;
//! [`ScenarioFile::into_parts`] converts it into the linear-unit
//! [`Scenario`] used by the optimizer, and [`ScenarioFile::from_parts`]
//! converts back.  The two directions round-trip: writing a loaded scenario
//! out again reproduces every numeric field to within floating-point
//! round-off (well under 1e-12 relative), so tooling can rewrite files
//! without drift.

use crn_core::units::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm};
use crn_core::{Point2, Scenario};
use serde::{Deserialize, Serialize};

/// Why a scenario file could not be loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaError {
    /// The document is malformed: unreadable, bad JSON, wrong keys, unit or
    /// horizon fields that make no sense.
    Format(String),
    /// The document parsed cleanly but describes an impossible instance
    /// (unreachable endpoints, nonpositive limits, ...).
    Invalid(String),
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemaError::Format(msg) | SchemaError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for SchemaError {}

/// Top-level scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Optional free-text note; preserved verbatim on round-trip.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub nodes: NodesSection,
    pub uav: UavSection,
    pub radio: RadioSection,
    pub limits: LimitsSection,
    pub horizon: HorizonSection,
}

/// Ground-node geometry, all coordinates in metres.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesSection {
    /// Secondary users served by the UAV.
    pub users: Vec<[f64; 2]>,
    /// Primary receivers protected by the interference-temperature limit.
    pub primaries: Vec<[f64; 2]>,
    /// Eavesdroppers with disc-shaped location uncertainty.
    pub eves: Vec<EveEntry>,
}

/// One eavesdropper: estimated position plus uncertainty radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EveEntry {
    pub pos_est: [f64; 2],
    pub radius_m: f64,
}

/// UAV mission endpoints and platform limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavSection {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub altitude_m: f64,
    pub v_max_mps: f64,
    pub p_max_w: f64,
}

/// Channel and receiver parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    /// Reference channel gain at 1 m, in dB.
    pub beta0_db: f64,
    /// Receiver noise power, in dBm.
    pub sigma2_dbm: f64,
    /// Ground-to-ground path-loss exponent.
    pub alpha: f64,
    /// Eavesdropper jamming power, in watts (0 disables jamming).
    pub pe_w: f64,
}

/// Operating constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    /// Interference-temperature threshold(s), in dBm: either one scalar
    /// applied to every primary receiver or one entry per receiver.
    pub gamma_it_dbm: GammaSpec,
    /// Minimum secrecy energy efficiency, in bits/s/Hz per watt.
    pub see_min: f64,
    /// Relative convergence tolerance for the optimizer.
    pub epsilon: f64,
}

/// Scalar-or-list form of the interference threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Scalar(f64),
    PerPrimary(Vec<f64>),
}

/// Mission horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonSection {
    /// Total mission duration in seconds.
    #[serde(rename = "T_s")]
    pub t_s: f64,
    /// Slot length in seconds; the slot count is `T_s / slot_s`.
    pub slot_s: f64,
}

/// A scenario converted to linear units plus the file-level extras that do
/// not live inside [`Scenario`] itself.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub epsilon: f64,
    pub description: Option<String>,
}

impl ScenarioFile {
    /// Parse a JSON document.
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        serde_json::from_str(text)
            .map_err(|e| SchemaError::Format(format!("invalid scenario JSON: {e}")))
    }

    /// Serialize back to pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }

    /// Convert to linear units and validate the result.
    pub fn into_parts(self) -> Result<LoadedScenario, SchemaError> {
        let bad = |msg: String| Err(SchemaError::Format(msg));
        if !(self.horizon.slot_s > 0.0) || !self.horizon.slot_s.is_finite() {
            return bad(format!(
                "horizon.slot_s must be a positive duration, got {}",
                self.horizon.slot_s
            ));
        }
        if !self.horizon.t_s.is_finite() || self.horizon.t_s <= 0.0 {
            return bad(format!(
                "horizon.T_s must be a positive duration, got {}",
                self.horizon.t_s
            ));
        }
        let slots = (self.horizon.t_s / self.horizon.slot_s).round();
        if slots < 1.0 {
            return bad(format!(
                "horizon T_s={} with slot_s={} yields no whole slot",
                self.horizon.t_s, self.horizon.slot_s
            ));
        }
        if !(self.limits.epsilon > 0.0) || !self.limits.epsilon.is_finite() {
            return bad(format!(
                "limits.epsilon must be a positive tolerance, got {}",
                self.limits.epsilon
            ));
        }
        let gamma_it = match &self.limits.gamma_it_dbm {
            GammaSpec::Scalar(dbm) => {
                vec![dbm_to_watts(*dbm); self.nodes.primaries.len()]
            }
            GammaSpec::PerPrimary(list) => {
                if list.len() != self.nodes.primaries.len() {
                    return bad(format!(
                        "limits.gamma_it_dbm lists {} thresholds but nodes.primaries has {} entries",
                        list.len(),
                        self.nodes.primaries.len()
                    ));
                }
                list.iter().map(|dbm| dbm_to_watts(*dbm)).collect()
            }
        };
        let scenario = Scenario {
            users: to_points(&self.nodes.users),
            primaries: to_points(&self.nodes.primaries),
            eves: self
                .nodes
                .eves
                .iter()
                .map(|e| crn_core::EveEstimate {
                    pos_est: Point2::new(e.pos_est[0], e.pos_est[1]),
                    radius: e.radius_m,
                })
                .collect(),
            q_start: Point2::new(self.uav.start[0], self.uav.start[1]),
            q_end: Point2::new(self.uav.end[0], self.uav.end[1]),
            altitude: self.uav.altitude_m,
            v_max: self.uav.v_max_mps,
            p_max: self.uav.p_max_w,
            radio: crn_core::RadioConstants {
                beta0: db_to_linear(self.radio.beta0_db),
                sigma2: dbm_to_watts(self.radio.sigma2_dbm),
                alpha: self.radio.alpha,
                pe: self.radio.pe_w,
            },
            gamma_it,
            see_min: self.limits.see_min,
            n_slots: slots as usize,
            slot_len: self.horizon.slot_s,
        };
        scenario
            .validate()
            .map_err(|e| SchemaError::Invalid(e.to_string()))?;
        Ok(LoadedScenario {
            scenario,
            epsilon: self.limits.epsilon,
            description: self.description,
        })
    }

    /// Rebuild the on-disk representation from a loaded scenario.
    pub fn from_parts(loaded: &LoadedScenario) -> Self {
        let s = &loaded.scenario;
        ScenarioFile {
            description: loaded.description.clone(),
            nodes: NodesSection {
                users: from_points(&s.users),
                primaries: from_points(&s.primaries),
                eves: s
                    .eves
                    .iter()
                    .map(|e| EveEntry {
                        pos_est: [e.pos_est.x, e.pos_est.y],
                        radius_m: e.radius,
                    })
                    .collect(),
            },
            uav: UavSection {
                start: [s.q_start.x, s.q_start.y],
                end: [s.q_end.x, s.q_end.y],
                altitude_m: s.altitude,
                v_max_mps: s.v_max,
                p_max_w: s.p_max,
            },
            radio: RadioSection {
                beta0_db: linear_to_db(s.radio.beta0),
                sigma2_dbm: watts_to_dbm(s.radio.sigma2),
                alpha: s.radio.alpha,
                pe_w: s.radio.pe,
            },
            limits: LimitsSection {
                gamma_it_dbm: GammaSpec::PerPrimary(
                    s.gamma_it.iter().map(|w| watts_to_dbm(*w)).collect(),
                ),
                see_min: s.see_min,
                epsilon: loaded.epsilon,
            },
            horizon: HorizonSection {
                t_s: s.n_slots as f64 * s.slot_len,
                slot_s: s.slot_len,
            },
        }
    }
}

/// Load and convert a scenario file from disk.
pub fn load_scenario(path: &std::path::Path) -> Result<LoadedScenario, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        SchemaError::Format(format!("cannot read scenario file {}: {e}", path.display()))
    })?;
    ScenarioFile::from_json(&text)?.into_parts().map_err(|e| match e {
        SchemaError::Format(msg) => SchemaError::Format(format!("{}: {msg}", path.display())),
        SchemaError::Invalid(msg) => SchemaError::Invalid(format!("{}: {msg}", path.display())),
    })
}

fn to_points(raw: &[[f64; 2]]) -> Vec<Point2> {
    raw.iter().map(|p| Point2::new(p[0], p[1])).collect()
}

fn from_points(pts: &[Point2]) -> Vec<[f64; 2]> {
    pts.iter().map(|p| [p.x, p.y]).collect()
}
