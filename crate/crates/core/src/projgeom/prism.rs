use nalgebra::{DMatrix, Matrix4x3, Vector4};
use serde::Serialize;

use super::{best_common_point, chord_line, ChordLine, GeomError, HomPoint, CONCURRENCY_TOL};

/// Values of `⟨p₄, y⟩ − w` within this of zero count as on the tangency locus.
pub const SIDE_TOL: f64 = 1e-10;
/// Third singular value of the centered points below this means co-circular.
const CIRCLE_TOL: f64 = 1e-8;

/// Which side of the tangency locus of `p` the point `y ∈ S³` lies on:
/// the sign of `⟨p₄, y⟩ − w` for `p = (p₄, w)`.
pub fn side_of_tangency_locus(p: &HomPoint, y: &Vector4<f64>) -> Result<i8, GeomError> {
    if !outside_ball(p) {
        return Err(GeomError::InsideBall);
    }
    let v = p.spatial().dot(y) - p.w();
    Ok(if v > SIDE_TOL {
        1
    } else if v < -SIDE_TOL {
        -1
    } else {
        0
    })
}

fn outside_ball(p: &HomPoint) -> bool {
    p.w() == 0.0 || p.spatial().norm() > p.w().abs() + 1e-9
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reject {
    CoincidentPoints,
    NotConcurrent,
    PInsideBall,
    BadSidePattern,
    TangentChord,
}

/// Six points of S³ whose chords (1,4), (2,5), (3,6) meet at a point
/// outside the ball, with endpoints alternating sides of its tangency locus.
#[derive(Clone, Debug, PartialEq)]
pub struct PrismConfig {
    pub points: [Vector4<f64>; 6],
    pub p: HomPoint,
    pub chords: [ChordLine; 3],
    pub sides: [i8; 6],
    pub is_m0: bool,
    pub residual: f64,
}

pub fn make_prism_config(points: &[Vector4<f64>; 6]) -> Result<PrismConfig, Reject> {
    let chord = |i: usize| chord_line(&points[i], &points[i + 3]).map_err(|_| Reject::CoincidentPoints);
    for i in 0..6 {
        for j in 0..i {
            if !((points[i] - points[j]).norm() > 1e-9) {
                return Err(Reject::CoincidentPoints);
            }
        }
    }
    let chords = [chord(0)?, chord(1)?, chord(2)?];
    let (p, residual) = best_common_point(&[&chords[0], &chords[1], &chords[2]]);
    if !(residual < CONCURRENCY_TOL) {
        return Err(Reject::NotConcurrent);
    }
    if !outside_ball(&p) {
        return Err(Reject::PInsideBall);
    }
    let mut sides = [0i8; 6];
    for (s, y) in sides.iter_mut().zip(points) {
        *s = side_of_tangency_locus(&p, y).map_err(|_| Reject::PInsideBall)?;
    }
    if sides.contains(&0) {
        return Err(Reject::TangentChord);
    }
    let alternating = (0..6).all(|i| sides[i] == if i % 2 == 0 { sides[0] } else { -sides[0] });
    if !alternating {
        return Err(Reject::BadSidePattern);
    }
    let is_m0 = third_singular_value(points) < CIRCLE_TOL;
    Ok(PrismConfig { points: *points, p, chords, sides, is_m0, residual })
}

fn centered(points: &[Vector4<f64>]) -> (Vector4<f64>, DMatrix<f64>) {
    let n = points.len();
    let mean = points.iter().sum::<Vector4<f64>>() / n as f64;
    (mean, DMatrix::from_fn(n, 4, |i, j| points[i][j] - mean[j]))
}

fn third_singular_value(points: &[Vector4<f64>]) -> f64 {
    let (_, m) = centered(points);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s[2]
}

/// Rotates the three points on the side of `x₁` about the axis of the
/// circle where the tangency locus meets the 2-sphere through all six
/// points. Positive `epsilon` turns them in the direction `x₁ → x₃ → x₅`.
pub fn cap_rotation(config: &PrismConfig, epsilon: f64) -> Result<[Vector4<f64>; 6], GeomError> {
    if epsilon == 0.0 {
        return Ok(config.points);
    }
    if config.is_m0 {
        return Err(GeomError::OnCircle);
    }
    let (mean, m) = centered(&config.points);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    if sv[2] < CIRCLE_TOL {
        return Err(GeomError::OnCircle);
    }
    if sv[3] > 1e-6 * sv[0] {
        // The points do not span a 3-space, so there is no 2-sphere through them.
        return Err(GeomError::IllConditioned);
    }
    let dir = |k: usize| Vector4::new(vt[(order[k], 0)], vt[(order[k], 1)], vt[(order[k], 2)], vt[(order[k], 3)]);
    let u = Matrix4x3::from_columns(&[dir(0), dir(1), dir(2)]);
    let center = mean - u * (u.transpose() * mean);
    let axis = u * (u.transpose() * config.p.spatial());
    if axis.norm() < 1e-12 {
        return Err(GeomError::IllConditioned);
    }
    let n = axis.normalize();
    // Orthonormal pair spanning the rotation plane inside the 3-space.
    let mut plane: Vec<Vector4<f64>> = Vec::new();
    for k in 0..3 {
        let mut v = dir(k) - n * n.dot(&dir(k));
        for w in &plane {
            v -= *w * w.dot(&v);
        }
        if v.norm() > 1e-6 {
            plane.push(v.normalize());
        }
        if plane.len() == 2 {
            break;
        }
    }
    let (e1, e2) = (plane[0], plane[1]);
    let angle = |y: &Vector4<f64>| {
        let d = y - center;
        e2.dot(&d).atan2(e1.dot(&d))
    };
    let [a1, a3, a5] = [0, 2, 4].map(|i| angle(&config.points[i]));
    // Is 1 → 3 → 5 counterclockwise in (e1, e2)?
    let ccw = ((a3 - a1).rem_euclid(std::f64::consts::TAU)) < ((a5 - a1).rem_euclid(std::f64::consts::TAU));
    let theta = if ccw { epsilon } else { -epsilon };
    let (s, c) = theta.sin_cos();
    let mut out = config.points;
    for i in [0, 2, 4] {
        let d = out[i] - center;
        let (x, y) = (e1.dot(&d), e2.dot(&d));
        let rest = d - e1 * x - e2 * y;
        out[i] = center + rest + e1 * (c * x - s * y) + e2 * (s * x + c * y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{random_s3, symmetric_tuple};
    use super::*;
    use nalgebra::Vector5;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    #[test]
    fn sides_at_infinity() {
        let p = HomPoint::new(Vector5::new(0.0, 0.0, 1.0, 0.0, 0.0)).unwrap();
        let up = Vector4::new(1.0, 0.0, 1.0, 0.0) * FRAC_1_SQRT_2;
        let down = Vector4::new(1.0, 0.0, -1.0, 0.0) * FRAC_1_SQRT_2;
        assert_eq!(side_of_tangency_locus(&p, &up), Ok(1));
        assert_eq!(side_of_tangency_locus(&p, &down), Ok(-1));
    }

    #[test]
    fn side_for_affine_point() {
        let p = HomPoint::from_affine(&Vector4::new(0.0, 0.0, 0.0, 2.0));
        assert_eq!(side_of_tangency_locus(&p, &Vector4::w()), Ok(1));
        let inside = HomPoint::from_affine(&Vector4::new(0.0, 0.5, 0.0, 0.0));
        assert_eq!(side_of_tangency_locus(&inside, &Vector4::w()), Err(GeomError::InsideBall));
    }

    #[test]
    fn secant_endpoints_get_opposite_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let q = random_s3(&mut rng) * rng.gen_range(1.05..4.0);
            let p = HomPoint::from_affine(&q);
            // Random direction through q that actually meets the sphere.
            let d = loop {
                let d = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
                let b = q.dot(&d);
                if b * b - (q.norm_squared() - 1.0) > 1e-3 {
                    break d;
                }
            };
            let b = q.dot(&d);
            let disc = (b * b - (q.norm_squared() - 1.0)).sqrt();
            let y1 = q + d * (-b - disc);
            let y2 = q + d * (-b + disc);
            let s1 = side_of_tangency_locus(&p, &y1).unwrap();
            let s2 = side_of_tangency_locus(&p, &y2).unwrap();
            assert_eq!(s1, -s2);
            assert_ne!(s1, 0);
        }
    }

    #[test]
    fn symmetric_tuple_is_a_prism() {
        let c = make_prism_config(&symmetric_tuple()).unwrap();
        assert!(c.p.at_infinity(1e-12));
        assert!(c.p.distance(&HomPoint::new(Vector5::new(0.0, 0.0, 1.0, 0.0, 0.0)).unwrap()) < 1e-12);
        assert_eq!(c.sides, [1, -1, 1, -1, 1, -1]);
        assert!(!c.is_m0);
    }

    #[test]
    fn equatorial_hexagon_rejected() {
        let x: [Vector4<f64>; 6] = std::array::from_fn(|k| {
            let a = TAU * k as f64 / 6.0;
            Vector4::new(a.cos(), a.sin(), 0.0, 0.0)
        });
        assert_eq!(make_prism_config(&x), Err(Reject::PInsideBall));
    }

    #[test]
    fn swapping_breaks_alternation() {
        let mut x = symmetric_tuple();
        x.swap(1, 4);
        assert_eq!(make_prism_config(&x), Err(Reject::BadSidePattern));
    }

    #[test]
    fn random_tuple_not_concurrent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: [Vector4<f64>; 6] = std::array::from_fn(|_| random_s3(&mut rng));
        assert_eq!(make_prism_config(&x), Err(Reject::NotConcurrent));
    }

    #[test]
    fn zero_rotation_is_identity() {
        let c = make_prism_config(&symmetric_tuple()).unwrap();
        assert_eq!(cap_rotation(&c, 0.0).unwrap(), c.points);
    }

    #[test]
    fn rotation_stays_on_the_sphere_and_moves_one_side() {
        let c = make_prism_config(&symmetric_tuple()).unwrap();
        let out = cap_rotation(&c, 0.2).unwrap();
        for i in 0..6 {
            assert!((out[i].norm() - 1.0).abs() < 1e-12);
            // The sphere of the configuration is y₄ = 0 and the axis is e₃.
            assert!(out[i][3].abs() < 1e-12);
            assert!((out[i][2] - c.points[i][2]).abs() < 1e-12);
            if i % 2 == 1 {
                assert_eq!(out[i], c.points[i]);
            } else {
                assert!((out[i] - c.points[i]).norm() > 0.1);
            }
        }
        let back = cap_rotation(&PrismConfig { points: out, ..c.clone() }, -0.2).unwrap();
        for i in 0..6 {
            assert!((back[i] - c.points[i]).norm() < 1e-12);
        }
    }
}
