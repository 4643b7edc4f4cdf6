use nalgebra::{SVector, Vector3};

use super::GeomError;
use crate::curve::PlaneR3;

/// Radius of the circle through three points, `|ab||bc||ca| / (4·area)`;
/// `+∞` for collinear points.
pub fn circumradius<const D: usize>(a: &SVector<f64, D>, b: &SVector<f64, D>, c: &SVector<f64, D>) -> f64 {
    let u = b - a;
    let v = c - a;
    let w = c - b;
    let (uu, vv, uv) = (u.norm_squared(), v.norm_squared(), u.dot(&v));
    // |u|²|v|² − (u·v)² = 4·area², computed via Lagrange's identity.
    let gram = (uu * vv - uv * uv).max(0.0);
    if gram <= 1e-30 * uu * vv || gram == 0.0 {
        return f64::INFINITY;
    }
    (uu * vv * w.norm_squared() / gram).sqrt() / 2.0
}

/// Inradius `area / semiperimeter`.
pub fn incircle_radius(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Result<f64, GeomError> {
    let (ab, bc, ca) = ((b - a).norm(), (c - b).norm(), (a - c).norm());
    let area = 0.5 * (b - a).cross(&(c - a)).norm();
    let s = 0.5 * (ab + bc + ca);
    if !(area > 1e-14 * s * s) {
        return Err(GeomError::DegenerateTriangle);
    }
    Ok(area / s)
}

pub fn triangle_plane(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Result<PlaneR3, GeomError> {
    let n = (b - a).cross(&(c - a));
    if !(n.norm() > 1e-14 * (b - a).norm_squared().max((c - a).norm_squared())) {
        return Err(GeomError::DegenerateTriangle);
    }
    Ok(PlaneR3::through(a, n))
}

/// Angle between two planes, in `[0, π/2]`.
pub fn plane_angle(p: &PlaneR3, q: &PlaneR3) -> f64 {
    // atan2 of |n×m| and |n·m| keeps precision near 0 and π/2.
    let c = p.normal.dot(&q.normal).abs();
    let s = p.normal.cross(&q.normal).norm();
    s.atan2(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector, Vector4};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Least-squares circle through points of R⁴: solve for center in the
    /// plane of the points from `|x|² = 2⟨c, x⟩ + k`.
    fn fitted_radius(pts: &[Vector4<f64>]) -> f64 {
        let o = pts[0];
        let u = (pts[1] - o).normalize();
        let v = {
            let w = pts[2] - o;
            (w - u * u.dot(&w)).normalize()
        };
        let n = pts.len();
        let a = DMatrix::from_fn(n, 3, |i, j| {
            let d = pts[i] - o;
            [2.0 * d.dot(&u), 2.0 * d.dot(&v), 1.0][j]
        });
        let rhs = DVector::from_fn(n, |i, _| {
            let d = pts[i] - o;
            d.dot(&u).powi(2) + d.dot(&v).powi(2)
        });
        let sol = a.svd(true, true).solve(&rhs, 1e-14).unwrap();
        (sol[2] + sol[0] * sol[0] + sol[1] * sol[1]).sqrt()
    }

    #[test]
    fn equilateral_unit_vectors() {
        let r = circumradius(&Vector4::x(), &Vector4::y(), &Vector4::z());
        assert!((r - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn great_circle_points() {
        let p = |a: f64| Vector4::new(a.cos(), 0.0, a.sin(), 0.0);
        assert!((circumradius(&p(0.1), &p(1.7), &p(4.0)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn collinear_is_infinite() {
        let a = Vector3::new(0.0, 0.0, 0.0);
        let b = Vector3::new(1.0, 1.0, 1.0);
        assert_eq!(circumradius(&a, &b, &(b * 2.0)), f64::INFINITY);
    }

    #[test]
    fn matches_fitting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let p: Vec<Vector4<f64>> = (0..3).map(|_| Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect();
            let r = circumradius(&p[0], &p[1], &p[2]);
            if r > 100.0 {
                continue;
            }
            assert!((r - fitted_radius(&p)).abs() < 1e-9 * r.max(1.0));
        }
    }

    #[test]
    fn right_triangle_inradius() {
        let r = incircle_radius(&Vector3::zeros(), &Vector3::new(3.0, 0.0, 0.0), &Vector3::new(0.0, 4.0, 0.0)).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        let flat = incircle_radius(&Vector3::zeros(), &Vector3::x(), &(Vector3::x() * 2.0));
        assert!(matches!(flat, Err(GeomError::DegenerateTriangle)));
    }

    #[test]
    fn parallel_planes_have_zero_angle() {
        let p = PlaneR3::new(Vector3::new(1.0, 2.0, 3.0), 0.5);
        let q = PlaneR3::new(Vector3::new(-1.0, -2.0, -3.0), 7.0);
        assert!(plane_angle(&p, &q) < 1e-15);
        let r = PlaneR3::new(Vector3::new(3.0, 0.0, -1.0), 0.0);
        assert!((plane_angle(&p, &r) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    fn vec3() -> impl Strategy<Value = Vector3<f64>> {
        prop::array::uniform3(-2.0f64..2.0).prop_map(Vector3::from)
    }

    proptest! {
        // θ ≤ (|h(a)| + |h(b)| + |h(c)|) / r for the angle between the
        // triangle's plane and any plane.
        #[test]
        fn small_angle_inequality(a in vec3(), b in vec3(), c in vec3(), n in vec3(), off in -2.0f64..2.0) {
            prop_assume!(n.norm() > 1e-3);
            let (Ok(r), Ok(q)) = (incircle_radius(&a, &b, &c), triangle_plane(&a, &b, &c)) else {
                return Ok(());
            };
            let p = PlaneR3::new(n, off);
            let heights = p.height(&a).abs() + p.height(&b).abs() + p.height(&c).abs();
            prop_assert!(plane_angle(&p, &q) <= heights / r + 1e-12);
        }
    }
}
