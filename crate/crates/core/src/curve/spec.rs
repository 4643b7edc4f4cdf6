use serde::{Deserialize, Serialize};

use super::{Ambient, CurveError, KnotCurve, TrigCurve};

/// Largest Fourier degree accepted from a spec file.
pub const MAX_SPEC_DEGREE: usize = 64;

/// On-disk curve description:
/// `{"ambient": "R3"|"S3", "degree": D, "coefficients": [[[a_k, b_k], ...] per coordinate]}`
/// where coordinate `i` is `Σ_k a_k cos(2πkt) + b_k sin(2πkt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub ambient: Ambient,
    pub degree: usize,
    pub coefficients: Vec<Vec<[f64; 2]>>,
}

impl CurveSpec {
    pub fn from_json_str(text: &str) -> Result<Self, CurveError> {
        serde_json::from_str(text).map_err(|e| CurveError::Spec(e.to_string()))
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self, CurveError> {
        serde_json::from_slice(bytes).map_err(|e| CurveError::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Structural checks followed by the curve invariants.
    pub fn to_curve(&self) -> Result<KnotCurve, CurveError> {
        let dim = match self.ambient {
            Ambient::R3 => 3,
            Ambient::S3 => 4,
        };
        if self.degree > MAX_SPEC_DEGREE {
            return Err(CurveError::Spec(format!("degree {} exceeds {MAX_SPEC_DEGREE}", self.degree)));
        }
        if self.coefficients.len() != dim {
            return Err(CurveError::Spec(format!(
                "{:?} curve needs {dim} coordinate lists, found {}",
                self.ambient,
                self.coefficients.len()
            )));
        }
        for (i, list) in self.coefficients.iter().enumerate() {
            if list.len() != self.degree + 1 {
                return Err(CurveError::Spec(format!(
                    "coordinate {i} has {} coefficient pairs, expected {}",
                    list.len(),
                    self.degree + 1
                )));
            }
            if list.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CurveError::Spec(format!("coordinate {i} has a non-finite coefficient")));
            }
        }
        let pairs: Vec<Vec<(f64, f64)>> = self
            .coefficients
            .iter()
            .map(|l| l.iter().map(|p| (p[0], p[1])).collect())
            .collect();
        let curve = match self.ambient {
            Ambient::R3 => KnotCurve::R3(TrigCurve::from_pairs(&pairs)?.padded(self.degree)),
            Ambient::S3 => KnotCurve::S3(TrigCurve::from_pairs(&pairs)?.padded(self.degree)),
        };
        curve.validate()?;
        Ok(curve)
    }
}

impl From<&KnotCurve> for CurveSpec {
    fn from(curve: &KnotCurve) -> Self {
        let pairs = match curve {
            KnotCurve::R3(c) => c.to_pairs(),
            KnotCurve::S3(c) => c.to_pairs(),
        };
        CurveSpec {
            ambient: curve.ambient(),
            degree: curve.degree(),
            coefficients: pairs
                .into_iter()
                .map(|l| l.into_iter().map(|(a, b)| [a, b]).collect())
                .collect(),
        }
    }
}

impl KnotCurve {
    /// Parses and validates a JSON curve spec.
    pub fn from_spec_json(text: &str) -> Result<KnotCurve, CurveError> {
        CurveSpec::from_json_str(text)?.to_curve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::preset;

    #[test]
    fn presets_survive_json() {
        for name in ["paper-trefoil-s3", "figure-eight-r3", "torus(2,7)-r3"] {
            let c = preset(name).unwrap();
            let text = CurveSpec::from(&c).to_json();
            assert_eq!(KnotCurve::from_spec_json(&text).unwrap(), c);
        }
    }

    #[test]
    fn malformed_specs() {
        let cases = [
            r#"{"ambient":"R3","degree":1,"coefficients":[[[0,0],[1,0]],[[0,0],[0,1]]]}"#,
            r#"{"ambient":"R3","degree":2,"coefficients":[[[0,0],[1,0]],[[0,0],[0,1]],[[0,0],[0,0]]]}"#,
            r#"{"ambient":"R4","degree":1,"coefficients":[]}"#,
            r#"{"ambient":"R3","degree":1000,"coefficients":[]}"#,
            r#"{"ambient":"R3","degree":1,"coefficients":[[[0,0],[1,0]],[[0,0],[0,1]],[[0,0],[0,0]]],"x":1}"#,
            "not json",
        ];
        for text in cases {
            assert!(matches!(KnotCurve::from_spec_json(text), Err(CurveError::Spec(_))), "{text}");
        }
    }

    #[test]
    fn constant_curve_has_vanishing_derivative() {
        let text = r#"{"ambient":"R3","degree":1,"coefficients":[[[1,0],[0,0]],[[0,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(KnotCurve::from_spec_json(text), Err(CurveError::VanishingDerivative(_))));
    }

    #[test]
    fn planar_circle_spec() {
        let text = r#"{"ambient":"R3","degree":1,"coefficients":[[[0,0],[1,0]],[[0,0],[0,1]],[[0,0],[0,0]]]}"#;
        let c = KnotCurve::from_spec_json(text).unwrap();
        assert_eq!(c.degree(), 1);
    }
}
