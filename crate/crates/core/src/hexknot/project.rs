use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use super::Hexagon;

/// Relative size below which a projection counts as non-generic.
pub const GENERIC_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    /// Segment indices `i < j`; segment `i` runs from vertex `i` to `i + 1`.
    pub segments: (usize, usize),
    /// True when segment `i` passes over segment `j`.
    pub first_over: bool,
    pub sign: i8,
    /// Crossing parameters along segments `i` and `j`, in `(0, 1)`.
    pub params: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingList {
    pub crossings: Vec<Crossing>,
    /// Smallest relative quantity met in the genericity tests.
    pub margin: f64,
}

impl CrossingList {
    pub fn writhe(&self) -> i32 {
        self.crossings.iter().map(|c| c.sign as i32).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonGeneric {
    pub margin: f64,
}

/// Right-handed frame `(u, v, d)` with `d` the viewing direction.
pub fn view_frame(d: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let d = d.normalize();
    let helper = if d.x.abs() < 0.6 { Vector3::x() } else { Vector3::y() };
    let u = (helper - d * d.dot(&helper)).normalize();
    let v = d.cross(&u);
    (u, v, d)
}

fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn point_segment_distance(p: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let ab = b - a;
    let s = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + ab * s - p).norm()
}

/// Orthogonal projection along `direction` with the viewer at `+direction`:
/// the strand with larger depth along `direction` is over.
pub fn project_hexagon(hex: &Hexagon, direction: &Vector3<f64>) -> Result<CrossingList, NonGeneric> {
    let (u, v, d) = view_frame(direction);
    let pts = hex.points();
    let scale = hex.diameter();
    let flat: Vec<Vector2<f64>> = pts.iter().map(|p| Vector2::new(u.dot(p), v.dot(p))).collect();
    let depth: Vec<f64> = pts.iter().map(|p| d.dot(p)).collect();
    let seg = |i: usize| (flat[i], flat[(i + 1) % 6]);
    let mut margin = f64::INFINITY;
    for i in 0..6 {
        let (a, b) = seg(i);
        margin = margin.min((b - a).norm() / scale);
        // Adjacent segments folding back onto each other.
        let (_, c) = seg((i + 1) % 6);
        let (e1, e2) = (b - a, c - b);
        let turn = cross2(&e1, &e2).abs() / (e1.norm() * e2.norm()).max(f64::MIN_POSITIVE);
        if e1.dot(&e2) < 0.0 {
            margin = margin.min(turn);
        }
    }
    let mut crossings = Vec::new();
    for i in 0..6 {
        for j in (i + 2)..6 {
            if i == 0 && j == 5 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, e) = seg(j);
            let (r, q) = (b - a, e - c);
            let denom = cross2(&r, &q);
            let ac = c - a;
            let s = cross2(&ac, &q) / denom;
            let t = cross2(&ac, &r) / denom;
            let inside = denom != 0.0 && s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0;
            if inside {
                let rel = denom.abs() / (r.norm() * q.norm());
                let ends = (s.min(1.0 - s) * r.norm()).min(t.min(1.0 - t) * q.norm()) / scale;
                let zi = depth[i] + s * (depth[(i + 1) % 6] - depth[i]);
                let zj = depth[j] + t * (depth[(j + 1) % 6] - depth[j]);
                let gap = (zi - zj).abs() / scale;
                margin = margin.min(rel).min(ends).min(gap);
                let first_over = zi > zj;
                let (over, under) = if first_over { (r, q) } else { (q, r) };
                let sign = if cross2(&over, &under) > 0.0 { 1 } else { -1 };
                crossings.push(Crossing { segments: (i, j), first_over, sign, params: (s, t) });
            } else {
                let gap = point_segment_distance(&a, &c, &e)
                    .min(point_segment_distance(&b, &c, &e))
                    .min(point_segment_distance(&c, &a, &b))
                    .min(point_segment_distance(&e, &a, &b));
                margin = margin.min(gap / scale);
            }
        }
    }
    if !(margin >= GENERIC_TOL) {
        return Err(NonGeneric { margin });
    }
    Ok(CrossingList { crossings, margin })
}
