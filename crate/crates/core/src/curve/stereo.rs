//! Stereographic identification of R³ with S³ minus the pole `(0,0,0,1)`.
//!
//! `lift(x) = (2x, |x|² − 1) / (|x|² + 1)` and its inverse
//! `project(y) = (y₁, y₂, y₃) / (1 − y₄)`.

use nalgebra::{Matrix4, Vector3, Vector4};

use super::{CurveError, SpaceCurve, Taylor};
use crate::series::Series;

pub fn north_pole() -> Vector4<f64> {
    Vector4::new(0.0, 0.0, 0.0, 1.0)
}

pub fn lift_to_s3(x: &Vector3<f64>) -> Vector4<f64> {
    let r2 = x.norm_squared();
    let d = r2 + 1.0;
    Vector4::new(2.0 * x.x / d, 2.0 * x.y / d, 2.0 * x.z / d, (r2 - 1.0) / d)
}

/// Stereographic projection from `pole`. For the north pole this is the
/// inverse of [`lift_to_s3`]; other poles are first rotated onto the north
/// pole by [`rotation_to_north`].
pub fn project_from_s3(y: &Vector4<f64>, pole: &Vector4<f64>) -> Result<Vector3<f64>, CurveError> {
    let y = rotation_to_north(pole) * y;
    project_north(&y)
}

fn project_north(y: &Vector4<f64>) -> Result<Vector3<f64>, CurveError> {
    let d = 1.0 - y.w;
    if d.abs() < 1e-14 {
        return Err(CurveError::AtPole);
    }
    Ok(Vector3::new(y.x / d, y.y / d, y.z / d))
}

/// Proper rotation of R⁴ taking the unit vector `pole` to `(0,0,0,1)`.
/// The identity for the north pole itself.
pub fn rotation_to_north(pole: &Vector4<f64>) -> Matrix4<f64> {
    let n = north_pole();
    let pole = pole.normalize();
    let v = pole - n;
    if v.norm() < 1e-15 {
        return Matrix4::identity();
    }
    let householder = Matrix4::identity() - v * v.transpose() * (2.0 / v.norm_squared());
    // Second reflection fixes the north pole and restores det = +1.
    let flip = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
    flip * householder
}

/// An R³ curve viewed in S³ after centering and rescaling:
/// `t ↦ lift((γ(t) − center) / scale)`.
#[derive(Clone, Debug)]
pub struct LiftedCurve<C> {
    pub base: C,
    pub center: Vector3<f64>,
    pub scale: f64,
}

impl<C: SpaceCurve<3>> LiftedCurve<C> {
    pub fn new(base: C, center: Vector3<f64>, scale: f64) -> Self {
        Self { base, center, scale }
    }

    /// Centers on the sample mean and scales to unit RMS radius, which puts
    /// the lifted curve comfortably away from the pole.
    pub fn normalized(base: C) -> Self {
        let n = 1024;
        let pts: Vec<_> = (0..n).map(|i| base.point(i as f64 / n as f64)).collect();
        let center = pts.iter().sum::<Vector3<f64>>() / n as f64;
        let rms = (pts.iter().map(|p| (p - center).norm_squared()).sum::<f64>() / n as f64).sqrt();
        Self::new(base, center, if rms > 0.0 { rms } else { 1.0 })
    }

    pub fn to_s3(&self, x: &Vector3<f64>) -> Vector4<f64> {
        lift_to_s3(&((x - self.center) / self.scale))
    }

    pub fn to_r3(&self, y: &Vector4<f64>) -> Result<Vector3<f64>, CurveError> {
        Ok(project_north(y)? * self.scale + self.center)
    }
}

impl<C: SpaceCurve<3>> SpaceCurve<4> for LiftedCurve<C> {
    fn taylor(&self, t: f64, order: usize) -> Taylor<4> {
        let base = self.base.taylor(t, order);
        let comp = |i: usize| {
            let mut s = base.component(i).scale(1.0 / self.scale);
            s.0[0] -= self.center[i] / self.scale;
            s
        };
        let x = [comp(0), comp(1), comp(2)];
        let denom = Series::constant(1.0) + x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let out = [
            x[0].scale(2.0).div(denom),
            x[1].scale(2.0).div(denom),
            x[2].scale(2.0).div(denom),
            (denom - Series::constant(2.0)).div(denom),
        ];
        Taylor::from_components(&out, order)
    }

    fn point(&self, t: f64) -> Vector4<f64> {
        self.to_s3(&self.base.point(t))
    }
}

/// An S³ curve seen in R³ through stereographic projection from `pole`.
#[derive(Clone, Debug)]
pub struct ProjectedCurve<C> {
    pub base: C,
    pub pole: Vector4<f64>,
    rotation: Matrix4<f64>,
}

impl<C: SpaceCurve<4>> ProjectedCurve<C> {
    pub fn new(base: C, pole: Vector4<f64>) -> Self {
        let pole = pole.normalize();
        Self { base, pole, rotation: rotation_to_north(&pole) }
    }

    pub fn to_r3(&self, y: &Vector4<f64>) -> Result<Vector3<f64>, CurveError> {
        project_north(&(self.rotation * y))
    }

    pub fn to_s3(&self, x: &Vector3<f64>) -> Vector4<f64> {
        self.rotation.transpose() * lift_to_s3(x)
    }
}

impl<C: SpaceCurve<4>> SpaceCurve<3> for ProjectedCurve<C> {
    fn taylor(&self, t: f64, order: usize) -> Taylor<3> {
        let mut base = self.base.taylor(t, order);
        for c in base.coeffs.iter_mut() {
            *c = self.rotation * *c;
        }
        let denom = Series::constant(1.0) - base.component(3);
        let out = [
            base.component(0).div(denom),
            base.component(1).div(denom),
            base.component(2).div(denom),
        ];
        Taylor::from_components(&out, order)
    }

    fn point(&self, t: f64) -> Vector3<f64> {
        let y = self.rotation * self.base.point(t);
        let d = 1.0 - y.w;
        Vector3::new(y.x / d, y.y / d, y.z / d)
    }
}

/// A curve in R⁴ \ 0 pushed radially onto S³.
#[derive(Clone, Debug)]
pub struct RadialCurve<C>(pub C);

impl<C: SpaceCurve<4>> SpaceCurve<4> for RadialCurve<C> {
    fn taylor(&self, t: f64, order: usize) -> Taylor<4> {
        let base = self.0.taylor(t, order);
        let parts = [0, 1, 2, 3].map(|i| base.component(i));
        let norm = parts.iter().fold(Series::ZERO, |acc, &p| acc + p * p).sqrt();
        Taylor::from_components(&parts.map(|p| p.div(norm)), order)
    }

    fn point(&self, t: f64) -> Vector4<f64> {
        self.0.point(t).normalize()
    }
}

/// Picks a projection pole on S³ far from every sample of `curve`: the
/// north pole when it is clear by at least `clearance`, otherwise the best
/// of a fixed candidate set.
pub fn pole_avoiding<C: SpaceCurve<4> + ?Sized>(curve: &C, extra: &[Vector4<f64>], clearance: f64) -> Vector4<f64> {
    let samples: Vec<Vector4<f64>> = (0..2048)
        .map(|i| curve.point(i as f64 / 2048.0))
        .chain(extra.iter().copied())
        .collect();
    let clearance_of = |q: &Vector4<f64>| {
        samples
            .iter()
            .map(|p| (p - q).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let n = north_pole();
    if clearance_of(&n) >= clearance {
        return n;
    }
    let mut candidates = Vec::new();
    for i in 0..4 {
        for s in [-1.0, 1.0] {
            let mut v = Vector4::zeros();
            v[i] = s;
            candidates.push(v);
        }
    }
    for i in 1..=64 {
        let q = crate::quasi::halton;
        candidates.push(crate::quasi::s3_point(q(i, 2), q(i, 3), q(i, 5)));
    }
    candidates
        .into_iter()
        .map(|q| (clearance_of(&q), q))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, q)| q)
        .unwrap_or(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radial_derivative_matches_differences() {
        let mut c = crate::curve::TrigCurve::<4>::new(vec![Vector4::new(0.3, 0.0, 0.1, 0.0)], vec![]);
        c.add_cos(0, 1, 1.0);
        c.add_sin(1, 1, 1.0);
        c.add_cos(2, 2, 0.4);
        c.add_sin(3, 3, 0.2);
        let r = RadialCurve(c);
        let h = 1e-5;
        for &t in &[0.0, 0.21, 0.77] {
            assert!((r.point(t).norm() - 1.0).abs() < 1e-15);
            let tay = r.taylor(t, 2);
            let fd1 = (r.point(t + h) - r.point(t - h)) / (2.0 * h);
            let fd2 = (r.point(t + h) - 2.0 * r.point(t) + r.point(t - h)) / (h * h);
            assert!((tay.derivative(1) - fd1).norm() < 1e-6 * fd1.norm());
            assert!((tay.derivative(2) - fd2).norm() < 1e-4 * fd2.norm());
        }
    }

    #[test]
    fn origin_lifts_to_south_pole() {
        let y = lift_to_s3(&Vector3::zeros());
        assert_eq!(y, Vector4::new(0.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn round_trip_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = Vector3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let y = lift_to_s3(&x);
            assert!((y.norm() - 1.0).abs() < 1e-14);
            let back = project_from_s3(&y, &north_pole()).unwrap();
            assert!((back - x).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_at_pole_fails() {
        assert!(matches!(project_from_s3(&north_pole(), &north_pole()), Err(CurveError::AtPole)));
        let q = Vector4::new(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(project_from_s3(&q, &q), Err(CurveError::AtPole)));
    }

    #[test]
    fn unit_circle_lifts_to_great_circle() {
        // Image lies in the linear plane spanned by e1, e2: a great circle.
        for i in 0..16 {
            let th = i as f64 * 0.4;
            let y = lift_to_s3(&Vector3::new(th.cos(), th.sin(), 0.0));
            assert!((y.norm() - 1.0).abs() < 1e-14);
            assert!(y.z.abs() < 1e-15 && y.w.abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_to_north_is_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = Vector4::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
            let r = rotation_to_north(&q);
            assert!((r * q - north_pole()).norm() < 1e-12);
            assert!((r.transpose() * r - Matrix4::identity()).norm() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
        let south = -north_pole();
        let r = rotation_to_north(&south);
        assert!((r * south - north_pole()).norm() < 1e-12);
    }
}
