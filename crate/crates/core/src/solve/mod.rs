//! Numerical search for concurrent-chord configurations inscribed in a
//! curve, their signed count, thickness, quadrisecants and certification of
//! inscribed trefoil hexagons.

mod certify;
mod quadrisecant;
mod search;
mod system;
mod thickness;

use thiserror::Error;

use crate::curve::CurveError;
use crate::gauss::GaussError;

pub use certify::{certify_params, certify_trefoil, picture, Branch, CertifiedTrefoil, Unresolved, CERTIFY_BUDGET, MIN_MARGIN};
pub use quadrisecant::{trefoil_quadrisecant_proximity, find_quadrisecants, ProximityRow, LINE_TOL, QuadrisecantConfig};
pub use search::{
    find_inscribed_prisms, intersection_sign, kappa, ConfigTuple, InvariantReport, SearchParams, ACCEPT_TOL, DEDUP_RADIUS,
};
pub use system::{Residual, ResidualSystem};
pub use thickness::{check_separation, thickness, SeparationReport, ThicknessKind, ThicknessReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("root is not transverse (Jacobian condition number {0:.3e})")]
    NonTransverse(f64),
    #[error("solution {index} has chord {distance} below twice the thickness {tau}")]
    SeparationViolated { index: usize, distance: f64, tau: f64 },
    #[error("points {0} and {1} are closest but not adjacent on the curve")]
    NotAdjacent(usize, usize),
    #[error("derivative degenerates near t = {0}")]
    DegenerateDerivative(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

/// Distance of two parameters on the circle `R/Z`.
pub(crate) fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}
