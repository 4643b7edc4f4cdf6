//! Analytic knot models.
//!
//! Every curve is a truncated Fourier series with period 1, so it is
//! analytic by construction. Curves either live in R³ or natively on the
//! unit sphere S³ ⊂ R⁴; the two are related by stereographic projection
//! (see [`stereo`]).

pub mod contact;
mod preset;
mod spec;
pub mod stereo;
mod trig;

use nalgebra::{SVector, Vector3, Vector4};
use thiserror::Error;

use crate::series::{Series, MAX_ORDER};

pub use contact::{
    angle_height_bound, plane_contact, plane_intersections, plane_intersections_with, AngleBound, ContactReport, PlaneR3,
    SideClass,
};
pub use preset::{preset, Preset};
pub use spec::CurveSpec;
pub use stereo::{lift_to_s3, project_from_s3, LiftedCurve, ProjectedCurve, RadialCurve};
pub use trig::TrigCurve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("derivative order {0} outside 1..=6")]
    DerivativeOrder(usize),
    #[error("point is the projection pole")]
    AtPole,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid curve spec: {0}")]
    Spec(String),
    #[error("curve derivative vanishes near t = {0}")]
    VanishingDerivative(f64),
    #[error("S³ curve leaves the unit sphere by {0:e}")]
    OffSphere(f64),
    #[error("no contact with the plane at t = {0} (|h| = {1:e})")]
    NoContact(f64, f64),
    #[error("contact order at t = {0} exceeds 6")]
    Indeterminate(f64),
    #[error("curve lies in the plane")]
    CurveInPlane,
    #[error("plane intersection count unstable ({coarse} vs {fine} roots); near-degenerate plane")]
    UnstableRootCount { coarse: usize, fine: usize },
}

/// Taylor coefficients `c_k = γ^(k)(t) / k!` for `k = 0..=MAX_ORDER`.
/// Entries above the requested order are zero.
#[derive(Clone, Copy, Debug)]
pub struct Taylor<const D: usize> {
    pub coeffs: [SVector<f64, D>; MAX_ORDER + 1],
}

impl<const D: usize> Taylor<D> {
    pub fn component(&self, i: usize) -> Series {
        Series(std::array::from_fn(|k| self.coeffs[k][i]))
    }

    pub fn from_components(parts: &[Series; D], order: usize) -> Self {
        let coeffs = std::array::from_fn(|k| {
            if k > order {
                SVector::zeros()
            } else {
                SVector::from_fn(|i, _| parts[i].0[k])
            }
        });
        Self { coeffs }
    }

    /// `γ^(k)(t)`.
    pub fn derivative(&self, k: usize) -> SVector<f64, D> {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs[k] * fact
    }
}

/// A Z-periodic smooth curve in R^D with exact derivatives.
pub trait SpaceCurve<const D: usize>: Send + Sync {
    /// Taylor expansion at `t` up to `order` (at most 6).
    fn taylor(&self, t: f64, order: usize) -> Taylor<D>;

    fn point(&self, t: f64) -> SVector<f64, D> {
        self.taylor(t, 0).coeffs[0]
    }

    fn velocity(&self, t: f64) -> SVector<f64, D> {
        self.taylor(t, 1).coeffs[1]
    }
}

impl<const D: usize, C: SpaceCurve<D> + ?Sized> SpaceCurve<D> for &C {
    fn taylor(&self, t: f64, order: usize) -> Taylor<D> {
        (**self).taylor(t, order)
    }
    fn point(&self, t: f64) -> SVector<f64, D> {
        (**self).point(t)
    }
    fn velocity(&self, t: f64) -> SVector<f64, D> {
        (**self).velocity(t)
    }
}

impl<const D: usize, C: SpaceCurve<D> + ?Sized> SpaceCurve<D> for Box<C> {
    fn taylor(&self, t: f64, order: usize) -> Taylor<D> {
        (**self).taylor(t, order)
    }
    fn point(&self, t: f64) -> SVector<f64, D> {
        (**self).point(t)
    }
    fn velocity(&self, t: f64) -> SVector<f64, D> {
        (**self).velocity(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Ambient {
    R3,
    S3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvePoint {
    R3(Vector3<f64>),
    S3(Vector4<f64>),
}

impl CurvePoint {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            CurvePoint::R3(v) => v.as_slice(),
            CurvePoint::S3(v) => v.as_slice(),
        }
    }
}

/// A knot given by a trigonometric polynomial, either in R³ or on S³.
#[derive(Clone, Debug, PartialEq)]
pub enum KnotCurve {
    R3(TrigCurve<3>),
    S3(TrigCurve<4>),
}

/// Number of samples used to check the curve invariants.
pub const VALIDATION_SAMPLES: usize = 10_000;

impl KnotCurve {
    pub fn ambient(&self) -> Ambient {
        match self {
            KnotCurve::R3(_) => Ambient::R3,
            KnotCurve::S3(_) => Ambient::S3,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            KnotCurve::R3(c) => c.degree(),
            KnotCurve::S3(c) => c.degree(),
        }
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        match self {
            KnotCurve::R3(c) => CurvePoint::R3(c.eval(t)),
            KnotCurve::S3(c) => CurvePoint::S3(c.eval(t)),
        }
    }

    pub fn deriv(&self, t: f64, order: usize) -> Result<CurvePoint, CurveError> {
        Ok(match self {
            KnotCurve::R3(c) => CurvePoint::R3(c.deriv(t, order)?),
            KnotCurve::S3(c) => CurvePoint::S3(c.deriv(t, order)?),
        })
    }

    /// Checks non-vanishing derivative and, for S³ curves, unit norm on a
    /// uniform sample.
    pub fn validate(&self) -> Result<(), CurveError> {
        let n = VALIDATION_SAMPLES;
        let speeds: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let v = match self.deriv(t, 1).expect("order 1 is valid") {
                    CurvePoint::R3(v) => v.norm(),
                    CurvePoint::S3(v) => v.norm(),
                };
                (t, v)
            })
            .collect();
        let max = speeds.iter().map(|s| s.1).fold(0.0, f64::max);
        if let Some(&(t, _)) = speeds.iter().find(|s| !(s.1 > 1e-6 * max.max(1e-300))) {
            return Err(CurveError::VanishingDerivative(t));
        }
        if let KnotCurve::S3(c) = self {
            let worst = (0..n)
                .map(|i| (c.eval(i as f64 / n as f64).norm() - 1.0).abs())
                .fold(0.0, f64::max);
            if !(worst <= 1e-12) {
                return Err(CurveError::OffSphere(worst));
            }
        }
        Ok(())
    }

    /// The curve as a map into S³. R³ curves are centered, scaled to unit
    /// RMS radius, and lifted.
    pub fn s3_model(&self) -> Box<dyn SpaceCurve<4>> {
        match self {
            KnotCurve::R3(c) => Box::new(LiftedCurve::normalized(c.clone())),
            KnotCurve::S3(c) => Box::new(c.clone()),
        }
    }

    /// The curve as a map into R³, using the same parameter as
    /// [`KnotCurve::s3_model`]. S³ curves are projected from a pole that
    /// stays clear of the curve.
    pub fn r3_model(&self) -> Box<dyn SpaceCurve<3>> {
        match self {
            KnotCurve::R3(c) => Box::new(c.clone()),
            KnotCurve::S3(c) => {
                let pole = stereo::pole_avoiding(c, &[], 0.2);
                Box::new(ProjectedCurve::new(c.clone(), pole))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn s3(p: CurvePoint) -> Vector4<f64> {
        match p {
            CurvePoint::S3(v) => v,
            _ => panic!("expected S3 point"),
        }
    }

    fn r3(p: CurvePoint) -> Vector3<f64> {
        match p {
            CurvePoint::R3(v) => v,
            _ => panic!("expected R3 point"),
        }
    }

    #[test]
    fn s3_trefoil_at_zero() {
        let c = preset("paper-trefoil-s3").unwrap();
        let p = s3(c.eval(0.0));
        let want = Vector4::new(1.0, 0.0, 1.0, 0.0) * FRAC_1_SQRT_2;
        assert!((p - want).norm() < 1e-15);
    }

    #[test]
    fn great_circle_quarter_turn() {
        let c = preset("great-circle-s3").unwrap();
        let p = s3(c.eval(0.25));
        assert!((p - Vector4::new(0.0, 1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn figure_eight_matches_term_by_term_sum() {
        // Independent summation straight from (2 + cos 2u)(cos 3u, sin 3u), sin 4u.
        let c = preset("figure-eight-r3").unwrap();
        let t = 0.3;
        let u = 2.0 * PI * t;
        let want = Vector3::new(
            (2.0 + (2.0 * u).cos()) * (3.0 * u).cos(),
            (2.0 + (2.0 * u).cos()) * (3.0 * u).sin(),
            (4.0 * u).sin(),
        );
        assert!((r3(c.eval(t)) - want).norm() < 1e-13);
    }

    #[test]
    fn s3_trefoil_first_derivative_closed_form() {
        let c = preset("paper-trefoil-s3").unwrap();
        let d = s3(c.deriv(0.0, 1).unwrap());
        let want = Vector4::new(0.0, 4.0 * PI, 0.0, 6.0 * PI) * FRAC_1_SQRT_2;
        assert!((d - want).norm() < 1e-12);
    }

    #[test]
    fn derivatives_are_periodic() {
        for name in ["paper-trefoil-s3", "trefoil-r3", "figure-eight-r3", "torus(2,5)-r3"] {
            let c = preset(name).unwrap();
            for order in 1..=6 {
                for &t in &[0.0, 0.137, 0.5, 0.91] {
                    let a = c.deriv(t, order).unwrap();
                    let b = c.deriv(t + 1.0, order).unwrap();
                    let scale = a.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
                    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                        assert!((x - y).abs() <= 1e-12 * scale, "{name} order {order}");
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_agrees_with_central_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let c = preset("figure-eight-r3").unwrap();
        let h = 1e-6;
        for _ in 0..20 {
            let t: f64 = rng.gen();
            let fd = (r3(c.eval(t + h)) - r3(c.eval(t - h))) / (2.0 * h);
            let d = r3(c.deriv(t, 1).unwrap());
            assert!((fd - d).norm() / d.norm() < 1e-6);
        }
    }

    #[test]
    fn presets_satisfy_invariants() {
        for name in [
            "paper-trefoil-s3",
            "great-circle-s3",
            "trefoil-r3",
            "figure-eight-r3",
            "torus(2,3)-r3",
            "torus(3,4)-r3",
        ] {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn off_sphere_curve_is_rejected() {
        let mut c = TrigCurve::<4>::new(vec![], vec![]);
        c.add_cos(0, 1, 1.0);
        c.add_sin(1, 1, 1.1);
        assert!(matches!(KnotCurve::S3(c).validate(), Err(CurveError::OffSphere(_))));
    }

    #[test]
    fn lifted_model_taylor_matches_point_differences() {
        let c = preset("trefoil-r3").unwrap();
        let m = c.s3_model();
        let t = 0.41;
        let tay = m.taylor(t, 2);
        let h = 1e-5;
        let fd1 = (m.point(t + h) - m.point(t - h)) / (2.0 * h);
        let fd2 = (m.point(t + h) - 2.0 * m.point(t) + m.point(t - h)) / (h * h);
        assert!((tay.derivative(1) - fd1).norm() < 1e-6 * fd1.norm());
        assert!((tay.derivative(2) - fd2).norm() < 1e-4 * fd2.norm());
        assert!((tay.coeffs[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projected_model_inverts_lift() {
        let c = preset("paper-trefoil-s3").unwrap();
        let r = c.r3_model();
        let s = c.s3_model();
        let KnotCurve::S3(base) = &c else { unreachable!() };
        let proj = ProjectedCurve::new(base.clone(), stereo::north_pole());
        for i in 0..10 {
            let t = i as f64 / 10.0;
            assert!((proj.to_s3(&r.point(t)) - s.point(t)).norm() < 1e-12);
        }
        let tay = r.taylor(0.2, 3);
        let h = 1e-5;
        let fd = (r.point(0.2 + h) - r.point(0.2 - h)) / (2.0 * h);
        assert!((tay.derivative(1) - fd).norm() < 1e-6 * fd.norm());
    }
}
