//! Homogeneous geometry of RP⁴ ⊃ S³ and the metric kernels built on it.
//!
//! A point `y` of S³ ⊂ R⁴ is homogenized as `(y, 1)` in R⁵. The closed
//! unit ball of the chart `w = 1` is the 4-ball whose boundary is S³.

mod metric;
mod mobius;
mod prism;

use nalgebra::{Matrix5, SMatrix, SymmetricEigen, Vector4, Vector5};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metric::{circumradius, incircle_radius, plane_angle, triangle_plane};
pub use mobius::{mobius_apply, MobiusGenerator, MobiusTransform};
pub use prism::{cap_rotation, make_prism_config, side_of_tangency_locus, PrismConfig, Reject, SIDE_TOL};

/// Principal-angle tolerance below which three chords count as concurrent.
pub const CONCURRENCY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("points coincide")]
    CoincidentPoints,
    #[error("two chord lines are identical")]
    IdenticalLines,
    #[error("lines are not concurrent (residual {0:e})")]
    NotConcurrent(f64),
    #[error("point lies inside or on the unit ball")]
    InsideBall,
    #[error("degenerate triangle")]
    DegenerateTriangle,
    #[error("point is sent to infinity")]
    PoleHit,
    #[error("invalid Möbius generator: {0}")]
    InvalidGenerator(String),
    #[error("configuration lies on a circle")]
    OnCircle,
    #[error("sphere fit is ill-conditioned")]
    IllConditioned,
}

/// A point of RP⁴: unit vector of R⁵ whose first nonzero coordinate is positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomPoint(Vector5<f64>);

impl HomPoint {
    /// Normalizes `v`; `None` for the zero vector.
    pub fn new(v: Vector5<f64>) -> Option<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        let mut u = v / n;
        // Tiny leading entries are rounding noise; skip them when choosing the sign.
        if let Some(lead) = u.iter().copied().find(|x| x.abs() > 1e-14) {
            if lead < 0.0 {
                u = -u;
            }
        }
        Some(Self(u))
    }

    pub fn from_affine(x: &Vector4<f64>) -> Self {
        Self::new(homogenize(x)).expect("w = 1 is nonzero")
    }

    pub fn coords(&self) -> &Vector5<f64> {
        &self.0
    }

    pub fn spatial(&self) -> Vector4<f64> {
        self.0.fixed_rows::<4>(0).into()
    }

    pub fn w(&self) -> f64 {
        self.0[4]
    }

    pub fn at_infinity(&self, tol: f64) -> bool {
        self.0[4].abs() <= tol
    }

    /// Affine representative in the chart `w = 1`, if finite.
    pub fn affine(&self) -> Option<Vector4<f64>> {
        (self.0[4].abs() > 1e-15).then(|| self.spatial() / self.0[4])
    }

    /// Projective distance: `min(|a − b|, |a + b|)`.
    pub fn distance(&self, other: &HomPoint) -> f64 {
        (self.0 - other.0).norm().min((self.0 + other.0).norm())
    }
}

pub fn homogenize(y: &Vector4<f64>) -> Vector5<f64> {
    Vector5::new(y[0], y[1], y[2], y[3], 1.0)
}

/// A projective line through two points of S³, stored as an orthonormal
/// frame of the corresponding 2-plane of R⁵.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordLine {
    pub frame: [Vector5<f64>; 2],
    pub ends: [Vector4<f64>; 2],
}

impl ChordLine {
    pub fn projector(&self) -> Matrix5<f64> {
        let [a, b] = self.frame;
        a * a.transpose() + b * b.transpose()
    }

    /// Distance from the unit vector `v` to the 2-plane.
    pub fn distance_to(&self, v: &Vector5<f64>) -> f64 {
        let [a, b] = self.frame;
        (v - a * a.dot(v) - b * b.dot(v)).norm()
    }

    pub fn contains(&self, p: &HomPoint, tol: f64) -> bool {
        self.distance_to(p.coords()) <= tol
    }
}

pub fn chord_line(a: &Vector4<f64>, b: &Vector4<f64>) -> Result<ChordLine, GeomError> {
    if !((a - b).norm() > 1e-9) {
        return Err(GeomError::CoincidentPoints);
    }
    let xa = homogenize(a);
    let xb = homogenize(b);
    let e1 = xa.normalize();
    let r = xb - e1 * e1.dot(&xb);
    Ok(ChordLine { frame: [e1, r.normalize()], ends: [*a, *b] })
}

/// The point of RP⁴ closest to lying on all three lines, with the
/// root-sum-square of its distances to them. The residual is symmetric in
/// the three lines and is zero exactly when they share a point.
pub fn best_common_point(lines: &[&ChordLine; 3]) -> (HomPoint, f64) {
    let sum: Matrix5<f64> = lines.iter().map(|l| l.projector()).sum();
    let eig = SymmetricEigen::new(sum);
    let k = eig.eigenvalues.imax();
    let v: Vector5<f64> = eig.eigenvectors.column(k).into();
    let residual = lines.iter().map(|l| l.distance_to(&v).powi(2)).sum::<f64>().sqrt();
    (HomPoint::new(v).expect("eigenvector is unit"), residual)
}

pub fn concurrency_point(l1: &ChordLine, l2: &ChordLine, l3: &ChordLine) -> Result<HomPoint, GeomError> {
    for (a, b) in [(l1, l2), (l1, l3), (l2, l3)] {
        if same_plane(a, b) {
            return Err(GeomError::IdenticalLines);
        }
    }
    let (p, residual) = best_common_point(&[l1, l2, l3]);
    if residual < CONCURRENCY_TOL {
        Ok(p)
    } else {
        Err(GeomError::NotConcurrent(residual))
    }
}

fn same_plane(a: &ChordLine, b: &ChordLine) -> bool {
    b.frame.iter().all(|v| a.distance_to(v) < 1e-12)
}

/// Orthonormal basis of the orthogonal complement of `span(xa, xb)` in R⁵,
/// oriented so that `det[xa, xb, B] > 0`.
pub fn complement_basis(xa: &Vector5<f64>, xb: &Vector5<f64>) -> SMatrix<f64, 5, 3> {
    let u1 = xa.normalize();
    let u2 = (xb - u1 * u1.dot(xb)).normalize();
    let mut basis: Vec<Vector5<f64>> = vec![u1, u2];
    // Gram–Schmidt over the standard basis, always taking the best-conditioned candidate.
    while basis.len() < 5 {
        let best = (0..5)
            .map(|i| {
                let mut v = Vector5::zeros();
                v[i] = 1.0;
                for b in &basis {
                    v -= b * b.dot(&v);
                }
                v
            })
            .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
            .expect("five candidates");
        let mut v = best.normalize();
        for b in &basis {
            v -= b * b.dot(&v);
        }
        basis.push(v.normalize());
    }
    let mut out = SMatrix::<f64, 5, 3>::from_columns(&[basis[2], basis[3], basis[4]]);
    let full = Matrix5::from_columns(&[*xa, *xb, basis[2], basis[3], basis[4]]);
    if full.determinant() < 0.0 {
        out.set_column(2, &(-basis[4]));
    }
    out
}

/// Residual of the concurrency condition for the chords (1,4), (2,5), (3,6).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrencyResidual {
    /// Components of the best point `p(φ) = cos φ·X₁ + sin φ·X₄` on chord
    /// 1 orthogonal to chord 2 (first three) and to chord 3 (last three),
    /// relative to `|p(φ)|`.
    pub components: [f64; 6],
    pub phi: f64,
    /// Normalized `p(φ)`.
    pub p_hat: HomPoint,
    /// Label-symmetric measure from [`best_common_point`]; zero exactly
    /// when `components` vanish.
    pub norm: f64,
}

pub fn concurrency_residual(points: &[Vector4<f64>; 6]) -> Result<ConcurrencyResidual, GeomError> {
    for i in 0..6 {
        for j in 0..i {
            if !((points[i] - points[j]).norm() > 1e-9) {
                return Err(GeomError::CoincidentPoints);
            }
        }
    }
    let x: Vec<Vector5<f64>> = points.iter().map(homogenize).collect();
    let b25 = complement_basis(&x[1], &x[4]);
    let b36 = complement_basis(&x[2], &x[5]);
    let (phi, components) = best_phi(&x[0], &x[3], &b25, &b36);
    let p = x[0] * phi.cos() + x[3] * phi.sin();
    let lines = [chord_line(&points[0], &points[3])?, chord_line(&points[1], &points[4])?, chord_line(&points[2], &points[5])?];
    let (_, norm) = best_common_point(&[&lines[0], &lines[1], &lines[2]]);
    Ok(ConcurrencyResidual { components, phi, p_hat: HomPoint::new(p).expect("chord endpoints differ"), norm })
}

/// Minimizes `|Bᵀ p(φ)| / |p(φ)|` over φ by a 2×2 generalized eigenproblem.
/// Returns φ in `(−π/2, π/2]` and the residual there.
pub fn best_phi(
    x1: &Vector5<f64>,
    x4: &Vector5<f64>,
    b25: &SMatrix<f64, 5, 3>,
    b36: &SMatrix<f64, 5, 3>,
) -> (f64, [f64; 6]) {
    let m = SMatrix::<f64, 5, 2>::from_columns(&[*x1, *x4]);
    let r25 = b25.transpose() * m;
    let r36 = b36.transpose() * m;
    let k = r25.transpose() * r25 + r36.transpose() * r36;
    let g = m.transpose() * m;
    // det(K − λG) = 0, smallest root.
    let a = g.determinant();
    let b = -(k[(0, 0)] * g[(1, 1)] + k[(1, 1)] * g[(0, 0)] - 2.0 * k[(0, 1)] * g[(0, 1)]);
    let c = k.determinant();
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    // Numerically stable pair of roots; the smaller one is wanted.
    let q = -0.5 * (b - disc);
    let lambda = if q != 0.0 { (c / q).min(q / a) } else { 0.0 };
    let s = k - g * lambda;
    // Null vector of the 2×2 matrix s, from its larger row.
    let row = if s.row(0).norm() >= s.row(1).norm() { 0 } else { 1 };
    let (u, v) = (s[(row, 0)], s[(row, 1)]);
    let coef = if u == 0.0 && v == 0.0 { (1.0, 0.0) } else { (-v, u) };
    let mut phi = coef.1.atan2(coef.0);
    if phi <= -std::f64::consts::FRAC_PI_2 {
        phi += std::f64::consts::PI;
    } else if phi > std::f64::consts::FRAC_PI_2 {
        phi -= std::f64::consts::PI;
    }
    let p = x1 * phi.cos() + x4 * phi.sin();
    let pn = p.norm();
    let r1 = b25.transpose() * p / pn;
    let r2 = b36.transpose() * p / pn;
    (phi, [r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]])
}
