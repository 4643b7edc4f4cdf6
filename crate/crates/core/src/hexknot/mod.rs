//! Knot type of a closed hexagon in R³: unknot, left or right trefoil, or
//! degenerate (segments touching, so no knot type).

mod bracket;
mod project;

use nalgebra::{DMatrix, Vector3, Vector4};
use serde::Serialize;
use thiserror::Error;

use crate::curve::stereo::project_from_s3;
use crate::quasi::sphere_directions;

pub use bracket::{normalized_bracket, right_trefoil, Laurent};
pub use project::{project_hexagon, view_frame, Crossing, CrossingList, NonGeneric, GENERIC_TOL};

/// Number of viewing directions tried by [`classify_hexagon`].
pub const DIRECTIONS: usize = 32;
const DIRECTION_TWIST: f64 = 0.1234;
/// Tolerance for co-spherical and co-circular tests on S³.
pub const SPHERE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HexError {
    #[error("hexagon vertices {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("points file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("points do not lie on a common 2-sphere (residual {0:e})")]
    NotCospherical(f64),
    #[error("projection pole lies on the sphere of the points")]
    PoleOnSphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hexagon {
    points: [Vector3<f64>; 6],
    diameter: f64,
}

impl Hexagon {
    pub fn new(points: [Vector3<f64>; 6]) -> Result<Self, HexError> {
        if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(HexError::NonFinite);
        }
        let mut diameter: f64 = 0.0;
        for i in 0..6 {
            for j in 0..i {
                diameter = diameter.max((points[i] - points[j]).norm());
            }
        }
        for i in 0..6 {
            for j in 0..i {
                if !((points[i] - points[j]).norm() > 1e-9 * diameter) {
                    return Err(HexError::Coincident(j, i));
                }
            }
        }
        Ok(Self { points, diameter })
    }

    pub fn points(&self) -> &[Vector3<f64>; 6] {
        &self.points
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Smallest distance between non-adjacent edges, relative to the diameter.
    pub fn edge_clearance(&self) -> f64 {
        let p = &self.points;
        let mut best = f64::INFINITY;
        for i in 0..6 {
            for j in (i + 2)..6 {
                if i == 0 && j == 5 {
                    continue;
                }
                let d = segment_distance(&p[i], &p[(i + 1) % 6], &p[j], &p[(j + 1) % 6]);
                best = best.min(d);
            }
        }
        best / self.diameter
    }
}

/// Distance between segments `[p1, q1]` and `[p2, q2]`.
pub fn segment_distance(p1: &Vector3<f64>, q1: &Vector3<f64>, p2: &Vector3<f64>, q2: &Vector3<f64>) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let (a, e, f) = (d1.norm_squared(), d2.norm_squared(), d2.dot(&r));
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HexKind {
    Unknot,
    TrefoilLeft,
    TrefoilRight,
    Degenerate,
}

impl HexKind {
    pub fn is_trefoil(self) -> bool {
        matches!(self, HexKind::TrefoilLeft | HexKind::TrefoilRight)
    }

    pub fn mirror(self) -> HexKind {
        match self {
            HexKind::TrefoilLeft => HexKind::TrefoilRight,
            HexKind::TrefoilRight => HexKind::TrefoilLeft,
            k => k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HexClass {
    pub kind: HexKind,
    /// Worst relative quantity in the crossing tests of the best direction,
    /// capped by the relative clearance between non-adjacent edges.
    pub margin: f64,
}

/// Knot type from the normalized bracket: 1, the right trefoil, or its mirror.
fn kind_of(poly: &Laurent) -> Option<HexKind> {
    if *poly == Laurent::monomial(0, 1) {
        Some(HexKind::Unknot)
    } else if *poly == right_trefoil() {
        Some(HexKind::TrefoilRight)
    } else if *poly == right_trefoil().mirror() {
        Some(HexKind::TrefoilLeft)
    } else {
        None
    }
}

/// Classifies from the most generic of [`DIRECTIONS`] projections.
pub fn classify_hexagon(hex: &Hexagon) -> HexClass {
    let clearance = hex.edge_clearance();
    if !(clearance >= GENERIC_TOL) {
        return HexClass { kind: HexKind::Degenerate, margin: clearance };
    }
    let mut best: Option<CrossingList> = None;
    let mut worst_margin: f64 = 0.0;
    for d in sphere_directions(DIRECTIONS, DIRECTION_TWIST) {
        match project_hexagon(hex, &d) {
            Ok(list) => {
                if best.as_ref().map_or(true, |b| list.margin > b.margin) {
                    best = Some(list);
                }
            }
            Err(NonGeneric { margin }) => worst_margin = worst_margin.max(margin),
        }
    }
    let Some(list) = best else {
        return HexClass { kind: HexKind::Degenerate, margin: worst_margin.min(clearance) };
    };
    let margin = list.margin.min(clearance);
    match kind_of(&normalized_bracket(&list)) {
        Some(kind) => HexClass { kind, margin },
        // Hexagons are unknots or trefoils; anything else is numerical trouble.
        None => HexClass { kind: HexKind::Degenerate, margin: 0.0 },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum StereoTrefoil {
    Yes(HexClass),
    /// The points lie on one circle, so every projection is planar.
    Coplanar,
    No(HexClass),
}

/// Classifies six points of S³ lying on a 2-sphere by projecting from the
/// point of S³ farthest from that 2-sphere.
pub fn is_stereographic_trefoil(points: &[Vector4<f64>; 6]) -> Result<StereoTrefoil, HexError> {
    let sphere = sphere_of(points)?;
    let Some((normal, offset)) = sphere else {
        return Ok(StereoTrefoil::Coplanar);
    };
    // The 2-sphere is {⟨n, y⟩ = offset} ∩ S³.
    let pole = if offset > 0.0 { -normal } else { normal };
    stereographic_class(points, &pole)
}

/// As [`is_stereographic_trefoil`] with an explicit pole, which must lie
/// off the 2-sphere through the points.
pub fn is_stereographic_trefoil_from(points: &[Vector4<f64>; 6], pole: &Vector4<f64>) -> Result<StereoTrefoil, HexError> {
    let Some((normal, offset)) = sphere_of(points)? else {
        return Ok(StereoTrefoil::Coplanar);
    };
    if (normal.dot(&pole.normalize()) - offset).abs() < 1e-6 {
        return Err(HexError::PoleOnSphere);
    }
    stereographic_class(points, pole)
}

/// Hyperplane `⟨n, y⟩ = offset` containing the points, or `None` when they
/// only span a plane (a circle of S³).
fn sphere_of(points: &[Vector4<f64>; 6]) -> Result<Option<(Vector4<f64>, f64)>, HexError> {
    let mean = points.iter().sum::<Vector4<f64>>() / 6.0;
    let m = DMatrix::from_fn(6, 4, |i, j| points[i][j] - mean[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    if sv[3] > SPHERE_TOL {
        return Err(HexError::NotCospherical(sv[3]));
    }
    if sv[2] < SPHERE_TOL {
        return Ok(None);
    }
    let k = order[3];
    let mut n = Vector4::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)], vt[(k, 3)]);
    if let Some(lead) = n.iter().copied().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            n = -n;
        }
    }
    Ok(Some((n, n.dot(&mean))))
}

fn stereographic_class(points: &[Vector4<f64>; 6], pole: &Vector4<f64>) -> Result<StereoTrefoil, HexError> {
    let pole = pole.normalize();
    let mut flat = [Vector3::zeros(); 6];
    for (f, y) in flat.iter_mut().zip(points) {
        *f = project_from_s3(y, &pole).map_err(|_| HexError::PoleOnSphere)?;
    }
    let hex = Hexagon::new(flat)?;
    let class = classify_hexagon(&hex);
    Ok(if class.kind.is_trefoil() { StereoTrefoil::Yes(class) } else { StereoTrefoil::No(class) })
}

/// Parses six vertices, one per line, as three numbers separated by
/// whitespace or commas. Blank lines and `#` comments are skipped.
pub fn parse_hexagon(text: &str) -> Result<Hexagon, HexError> {
    let mut pts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if fields.len() != 3 {
            return Err(HexError::Parse { line: idx + 1, msg: format!("expected 3 numbers, found {}", fields.len()) });
        }
        let mut v = Vector3::zeros();
        for (k, f) in fields.iter().enumerate() {
            v[k] = f.parse::<f64>().map_err(|e| HexError::Parse { line: idx + 1, msg: e.to_string() })?;
        }
        if pts.len() == 6 {
            return Err(HexError::Parse { line: idx + 1, msg: "more than six points".into() });
        }
        pts.push(v);
    }
    if pts.len() != 6 {
        return Err(HexError::Parse { line: text.lines().count(), msg: format!("expected 6 points, found {}", pts.len()) });
    }
    Hexagon::new(std::array::from_fn(|i| pts[i]))
}

/// Straight triangular prism with the top triangle turned by `twist`,
/// visited bottom/top alternately: `(b₁, t₂, b₃, t₁, b₂, t₃)`.
pub fn twisted_prism_points(twist: f64) -> [Vector3<f64>; 6] {
    let b = |k: usize| {
        let a = std::f64::consts::TAU * k as f64 / 3.0;
        Vector3::new(a.cos(), a.sin(), 0.0)
    };
    let t = |k: usize| {
        let a = std::f64::consts::TAU * k as f64 / 3.0 + twist;
        Vector3::new(a.cos(), a.sin(), 1.0)
    };
    [b(0), t(1), b(2), t(0), b(1), t(2)]
}
