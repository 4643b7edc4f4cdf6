use nalgebra::{Matrix4, Vector3};

use super::GeomError;
use crate::curve::stereo::{lift_to_s3, project_from_s3, north_pole};

#[derive(Clone, Debug, PartialEq)]
pub enum MobiusGenerator {
    Translate(Vector3<f64>),
    Scale(f64),
    /// Orthogonal map of R⁴ applied to the stereographic lift.
    Rotate(Matrix4<f64>),
}

/// A word in the generators, applied left to right.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MobiusTransform {
    word: Vec<MobiusGenerator>,
}

impl MobiusTransform {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(word: Vec<MobiusGenerator>) -> Result<Self, GeomError> {
        let mut m = Self::identity();
        for g in word {
            m = m.then(g)?;
        }
        Ok(m)
    }

    /// Appends a generator after checking it.
    pub fn then(mut self, g: MobiusGenerator) -> Result<Self, GeomError> {
        match &g {
            MobiusGenerator::Scale(s) if !(s.is_finite() && *s != 0.0) => {
                return Err(GeomError::InvalidGenerator(format!("scale {s}")));
            }
            MobiusGenerator::Translate(v) if !v.iter().all(|x| x.is_finite()) => {
                return Err(GeomError::InvalidGenerator("non-finite translation".into()));
            }
            MobiusGenerator::Rotate(r) => {
                let err = (r.transpose() * r - Matrix4::identity()).norm();
                if !(err <= 1e-12) {
                    return Err(GeomError::InvalidGenerator(format!("rotation not orthogonal ({err:e})")));
                }
            }
            _ => {}
        }
        self.word.push(g);
        Ok(self)
    }

    pub fn word(&self) -> &[MobiusGenerator] {
        &self.word
    }
}

pub fn mobius_apply(m: &MobiusTransform, x: &Vector3<f64>) -> Result<Vector3<f64>, GeomError> {
    let mut x = *x;
    for g in &m.word {
        x = match g {
            MobiusGenerator::Translate(v) => x + v,
            MobiusGenerator::Scale(s) => x * *s,
            MobiusGenerator::Rotate(r) => {
                let y = r * lift_to_s3(&x);
                // Close to the pole the image is too far out to be meaningful.
                if (y - north_pole()).norm() < 1e-7 {
                    return Err(GeomError::PoleHit);
                }
                project_from_s3(&y, &north_pole()).map_err(|_| GeomError::PoleHit)?
            }
        };
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix4<f64> {
        let a = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        a.qr().q()
    }

    /// Residual of the best sphere-and-plane fit: points are co-circular
    /// when they lie on one plane and one sphere.
    fn circle_fit_residual(pts: &[Vector3<f64>]) -> f64 {
        let n = pts.len();
        let c = pts.iter().sum::<Vector3<f64>>() / n as f64;
        let centered = DMatrix::from_fn(n, 3, |i, j| pts[i][j] - c[j]);
        let svd = centered.clone().svd(false, true);
        let vt = svd.v_t.unwrap();
        let k = svd.singular_values.imin();
        let normal = Vector3::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)]);
        let plane_res = pts.iter().map(|p| (p - c).dot(&normal).abs()).fold(0.0, f64::max);
        let a = DMatrix::from_fn(n, 4, |i, j| if j < 3 { 2.0 * (pts[i][j] - c[j]) } else { 1.0 });
        let b = DVector::from_fn(n, |i, _| (pts[i] - c).norm_squared());
        let sol = a.clone().svd(true, true).solve(&b, 1e-14).unwrap();
        let sphere_res = (a * sol - b).amax();
        let scale = pts.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
        (plane_res / scale).max(sphere_res / (scale * scale))
    }

    #[test]
    fn identity_word() {
        let x = Vector3::new(0.3, -1.0, 2.0);
        assert_eq!(mobius_apply(&MobiusTransform::identity(), &x).unwrap(), x);
    }

    #[test]
    fn scaling_cancels() {
        let m = MobiusTransform::new(vec![MobiusGenerator::Scale(2.0), MobiusGenerator::Scale(0.5)]).unwrap();
        let x = Vector3::new(0.3, -1.0, 2.0);
        assert!((mobius_apply(&m, &x).unwrap() - x).norm() < 1e-12);
    }

    #[test]
    fn bad_generators_rejected() {
        assert!(MobiusTransform::new(vec![MobiusGenerator::Scale(0.0)]).is_err());
        assert!(MobiusTransform::new(vec![MobiusGenerator::Rotate(Matrix4::identity() * 2.0)]).is_err());
    }

    #[test]
    fn pole_hit_is_reported() {
        // Rotation swapping the south pole (image of the origin) with the north pole.
        let r = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0));
        let m = MobiusTransform::new(vec![MobiusGenerator::Rotate(r)]).unwrap();
        assert!(matches!(mobius_apply(&m, &Vector3::zeros()), Err(GeomError::PoleHit)));
    }

    #[test]
    fn circles_stay_circles() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = MobiusTransform::new(vec![
            MobiusGenerator::Translate(Vector3::new(0.2, -0.1, 0.4)),
            MobiusGenerator::Rotate(random_rotation(&mut rng)),
            MobiusGenerator::Scale(-1.7),
            MobiusGenerator::Rotate(random_rotation(&mut rng)),
        ])
        .unwrap();
        let mut tested = 0;
        while tested < 50 {
            let center = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let u = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
            let v = u.cross(&Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).normalize();
            let r = rng.gen_range(0.1..1.0);
            let imgs: Result<Vec<_>, _> = (0..12)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / 12.0;
                    mobius_apply(&m, &(center + (u * a.cos() + v * a.sin()) * r))
                })
                .collect();
            let Ok(imgs) = imgs else { continue };
            // Circles through the pole become lines; too close to one is ill-posed.
            if imgs.iter().any(|p| p.norm() > 1e3) {
                continue;
            }
            assert!(circle_fit_residual(&imgs) < 1e-8, "{}", circle_fit_residual(&imgs));
            tested += 1;
        }
    }
}
