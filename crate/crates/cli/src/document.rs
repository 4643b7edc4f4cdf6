use serde::{Deserialize, Serialize};
use trefoil_core::solve::{CertifiedTrefoil, ConfigTuple, QuadrisecantConfig, Unresolved};

use crate::config::ConfigEcho;
use crate::CliError;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "trefoil";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Payload {
    Search(SearchPayload),
    Invariant(InvariantPayload),
    Thickness(ThicknessPayload),
    Certify(CertifyPayload),
    Quadrisecants(QuadrisecantPayload),
    ClassifyHex(HexPayload),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub params: [f64; 6],
    pub phi: f64,
    pub residual: f64,
    /// Intersection sign; absent for a non-transverse root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    /// Jacobian condition number; absent when singular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    /// Homogeneous coordinates of the common chord point in RP⁴.
    pub concurrency_point: [f64; 5],
    pub at_infinity: bool,
    pub cocircular: bool,
    pub points: [[f64; 4]; 6],
}

impl From<&ConfigTuple> for SolutionRecord {
    fn from(s: &ConfigTuple) -> Self {
        let p = s.prism.p.coords();
        SolutionRecord {
            params: s.params,
            phi: s.phi,
            residual: s.residual,
            sign: s.sign,
            condition: s.condition.is_finite().then_some(s.condition),
            concurrency_point: std::array::from_fn(|i| p[i] + 0.0),
            at_infinity: s.prism.p.at_infinity(1e-9),
            cocircular: s.prism.is_m0,
            points: s.points.map(|y| [y.x, y.y, y.z, y.w]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasepointRun {
    pub basepoint: f64,
    pub solutions: Vec<SolutionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchPayload {
    pub runs: Vec<BasepointRun>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantRun {
    pub basepoint: f64,
    /// Signed count; absent when some root is not transverse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<i64>,
    pub parity: u8,
    pub non_transverse: usize,
    pub solutions: Vec<SolutionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantPayload {
    pub runs: Vec<InvariantRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2_error: Option<String>,
    /// `|𝔎| = |a₂|` on every run, when both sides are known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_matches_a2: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_solution_distance: Option<f64>,
    pub solutions_checked: usize,
    pub random_sets: usize,
    pub random_sets_below: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThicknessPayload {
    pub tau: f64,
    pub kind: String,
    pub triple: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation_error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Certified,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertRecord {
    pub basepoint: f64,
    pub solution: usize,
    pub status: CertStatus,
    pub branch: String,
    pub classifier_calls: usize,
    /// Hexagon parameters; for unresolved runs, the best trefoil seen.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<[f64; 6]>,
    /// Vertices in the R³ picture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<[[f64; 3]; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hex_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Projection pole of the R³ picture for S³ curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<[f64; 4]>,
}

impl CertRecord {
    pub fn certified(basepoint: f64, solution: usize, c: &CertifiedTrefoil, pole: Option<[f64; 4]>) -> Self {
        CertRecord {
            basepoint,
            solution,
            status: CertStatus::Certified,
            branch: format!("{:?}", c.branch),
            classifier_calls: c.classifier_calls,
            params: Some(c.params),
            points: Some(c.points.map(|p| [p.x, p.y, p.z])),
            hex_kind: Some(format!("{:?}", c.class.kind)),
            margin: Some(c.class.margin),
            pole,
        }
    }

    pub fn unresolved(basepoint: f64, solution: usize, u: &Unresolved, pole: Option<[f64; 4]>) -> Self {
        CertRecord {
            basepoint,
            solution,
            status: CertStatus::Unresolved,
            branch: format!("{:?}", u.branch),
            classifier_calls: u.classifier_calls,
            params: u.best.map(|b| b.0),
            points: None,
            hex_kind: u.best.map(|b| format!("{:?}", b.1.kind)),
            margin: u.best.map(|b| b.1.margin),
            pole,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyPayload {
    pub solutions_found: usize,
    pub certified: usize,
    pub results: Vec<CertRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadRecord {
    pub params: [f64; 4],
    pub point: [f64; 3],
    pub direction: [f64; 3],
    pub order: [usize; 4],
    pub alternating: bool,
    pub residual: f64,
}

impl From<&QuadrisecantConfig> for QuadRecord {
    fn from(q: &QuadrisecantConfig) -> Self {
        QuadRecord {
            params: q.params,
            point: [q.point.x, q.point.y, q.point.z],
            direction: [q.direction.x, q.direction.y, q.direction.z],
            order: q.order,
            alternating: q.alternating,
            residual: q.residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProximityRecord {
    pub trefoil: usize,
    pub quadrisecant: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrisecantPayload {
    pub quadrisecants: Vec<QuadRecord>,
    /// Certified trefoils the proximity rows refer to.
    pub trefoils: Vec<CertRecord>,
    pub proximity: Vec<ProximityRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexPayload {
    pub points: [[f64; 3]; 6],
    pub hex_kind: String,
    pub margin: f64,
}

impl ResultDocument {
    pub fn new(config: ConfigEcho, payload: Payload) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            payload,
            timings: None,
        }
    }

    /// Pretty JSON with a trailing newline. Non-finite numbers would turn
    /// into `null`, and optional fields are omitted rather than null, so any
    /// null is rejected.
    pub fn to_json(&self) -> Result<String, CliError> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Internal(e.to_string()))?;
        if let Some(path) = find_null(&value, String::new()) {
            return Err(CliError::Internal(format!("non-finite number at {path}")));
        }
        let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("result document: {e}")))
    }
}

fn find_null(v: &serde_json::Value, path: String) -> Option<String> {
    match v {
        serde_json::Value::Null => Some(if path.is_empty() { "/".into() } else { path }),
        serde_json::Value::Array(items) => items.iter().enumerate().find_map(|(i, x)| find_null(x, format!("{path}/{i}"))),
        serde_json::Value::Object(map) => map.iter().find_map(|(k, x)| find_null(x, format!("{path}/{k}"))),
        _ => None,
    }
}
