//! From a concurrent-chord configuration to a genuine inscribed trefoil:
//! six curve points near the configuration whose hexagon classifies as a
//! trefoil with a positive margin.

use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ConfigTuple;
use crate::curve::stereo::pole_avoiding;
use crate::curve::{plane_contact, KnotCurve, PlaneR3, ProjectedCurve, SideClass, SpaceCurve};
use crate::hexknot::{classify_hexagon, HexClass, HexKind, Hexagon};

/// Classifier calls allowed per certification.
pub const CERTIFY_BUDGET: usize = 10_000;
/// Smallest classifier margin accepted as a certificate.
pub const MIN_MARGIN: f64 = 1e-6;
/// Polishing stops once the margin reaches this.
const GOOD_MARGIN: f64 = 1e-2;
const FLAT_TOL: f64 = 1e-9;

/// Shape of the six points in the R³ picture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Spatial,
    /// Coplanar but not on one circle.
    Coplanar,
    Cocircular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedTrefoil {
    pub params: [f64; 6],
    /// Hexagon vertices on the R³ picture of the curve.
    pub points: [Vector3<f64>; 6],
    pub class: HexClass,
    pub branch: Branch,
    pub classifier_calls: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unresolved {
    pub branch: Branch,
    pub classifier_calls: usize,
    /// Best trefoil seen, if any, with its parameters.
    pub best: Option<([f64; 6], HexClass)>,
}

struct Search<'a, C: ?Sized> {
    curve: &'a C,
    calls: usize,
}

impl<C: SpaceCurve<3> + ?Sized> Search<'_, C> {
    fn points(&self, t: &[f64; 6]) -> [Vector3<f64>; 6] {
        t.map(|s| self.curve.point(s))
    }

    fn classify(&mut self, t: &[f64; 6]) -> Option<HexClass> {
        if self.calls >= CERTIFY_BUDGET || !cyclically_ordered(t) {
            return None;
        }
        self.calls += 1;
        Some(match Hexagon::new(self.points(t)) {
            Ok(h) => classify_hexagon(&h),
            Err(_) => HexClass { kind: HexKind::Degenerate, margin: 0.0 },
        })
    }
}

fn cyclically_ordered(t: &[f64; 6]) -> bool {
    (0..6).all(|k| {
        let next = if k == 5 { t[0] + 1.0 } else { t[k + 1] };
        next > t[k]
    })
}

fn det3(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    Matrix3::from_columns(&[*a, *b, *c]).determinant()
}

/// Signed volume of the tetrahedron on edges `(i, i+1)` and `(i+3, i+4)`
/// and its gradient in the six parameters. The concurrency of chords
/// `(i, i+3)` and `(i+1, i+4)` makes these four points concyclic, so the
/// volume vanishes on the configuration itself.
fn opposite_volume<C: SpaceCurve<3> + ?Sized>(curve: &C, t: &[f64; 6], i: usize) -> (f64, Vector6<f64>) {
    let idx = [i, (i + 1) % 6, (i + 3) % 6, (i + 4) % 6];
    let p = idx.map(|k| curve.point(t[k]));
    let v = idx.map(|k| curve.taylor(t[k], 1).derivative(1));
    let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
    let vol = det3(&(b - a), &(c - a), &(d - a));
    let mut grad = Vector6::zeros();
    grad[idx[0]] += -det3(&v[0], &(c - a), &(d - a)) - det3(&(b - a), &v[0], &(d - a)) - det3(&(b - a), &(c - a), &v[0]);
    grad[idx[1]] += det3(&v[1], &(c - a), &(d - a));
    grad[idx[2]] += det3(&(b - a), &v[2], &(d - a));
    grad[idx[3]] += det3(&(b - a), &(c - a), &v[3]);
    (vol, grad)
}

fn branch_of(points: &[Vector3<f64>; 6]) -> (Branch, Option<PlaneR3>) {
    let mean = points.iter().sum::<Vector3<f64>>() / 6.0;
    let m = DMatrix::from_fn(6, 3, |i, j| points[i][j] - mean[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, smallest) = svd.singular_values.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("three values");
    let scale = svd.singular_values.max();
    if smallest > FLAT_TOL * scale {
        return (Branch::Spatial, None);
    }
    let normal = Vector3::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)]);
    let plane = PlaneR3::through(&mean, normal);
    // Concyclic iff |x|² is affine in the in-plane coordinates.
    let a = DMatrix::from_fn(6, 4, |i, j| match j {
        0..=2 => points[i][j] - mean[j],
        _ => 1.0,
    });
    let rhs = nalgebra::DVector::from_fn(6, |i, _| (points[i] - mean).norm_squared());
    let fit = a.clone().svd(true, true).solve(&rhs, 1e-14).expect("requested");
    let resid = (a * fit - rhs).amax();
    let branch = if resid < FLAT_TOL * scale * scale { Branch::Cocircular } else { Branch::Coplanar };
    (branch, Some(plane))
}

/// Parameters whose opposite-edge volumes are `target`, by a few
/// least-norm Gauss–Newton steps.
fn hit_volumes<C: SpaceCurve<3> + ?Sized>(curve: &C, t0: &[f64; 6], target: &[f64; 3]) -> Option<[f64; 6]> {
    let mut t = *t0;
    for _ in 0..4 {
        let mut jac = SMatrix::<f64, 3, 6>::zeros();
        let mut miss = nalgebra::Vector3::zeros();
        for i in 0..3 {
            let (v, g) = opposite_volume(curve, &t, i);
            jac.set_row(i, &g.transpose());
            miss[i] = target[i] - v;
        }
        let jjt = jac * jac.transpose();
        let step = jac.transpose() * jjt.try_inverse()? * miss;
        for k in 0..6 {
            t[k] += step[k];
        }
    }
    Some(t)
}

/// Parameter near `t0` where the curve reaches height `h` over `plane`.
fn slide_to_height<C: SpaceCurve<3> + ?Sized>(curve: &C, plane: &PlaneR3, t0: f64, h: f64, window: f64) -> Option<f64> {
    let f = |t: f64| plane.height(&curve.point(t)) - h;
    let n = 64;
    let mut best: Option<f64> = None;
    for k in 0..n {
        let (a, b) = (t0 - window + 2.0 * window * k as f64 / n as f64, t0 - window + 2.0 * window * (k + 1) as f64 / n as f64);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 || fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            if best.map_or(true, |r| (root - t0).abs() < (r - t0).abs()) {
                best = Some(root);
            }
        }
    }
    best
}

fn consider(best: &mut Option<([f64; 6], HexClass)>, t: [f64; 6], c: HexClass) {
    if c.kind.is_trefoil() && best.as_ref().map_or(true, |b| c.margin > b.1.margin) {
        *best = Some((t, c));
    }
}

/// Certifies near `params` on a curve in R³.
pub fn certify_params<C: SpaceCurve<3> + ?Sized>(curve: &C, params: &[f64; 6]) -> Result<CertifiedTrefoil, Unresolved> {
    let mut s = Search { curve, calls: 0 };
    let base = s.points(params);
    let diam = (0..6).flat_map(|i| (0..6).map(move |j| (i, j))).map(|(i, j)| (base[i] - base[j]).norm()).fold(0.0, f64::max);
    let (branch, plane) = branch_of(&base);
    let mut best: Option<([f64; 6], HexClass)> = None;

    if let Some(c) = s.classify(params) {
        consider(&mut best, *params, c);
    }
    // Push the three degenerate crossings off in each sign pattern.
    for scale in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
        for pattern in 0..8u32 {
            let target: [f64; 3] = std::array::from_fn(|i| if pattern & (1 << i) == 0 { scale } else { -scale } * diam.powi(3));
            let Some(t) = hit_volumes(curve, params, &target) else { continue };
            if let Some(c) = s.classify(&t) {
                consider(&mut best, t, c);
            }
        }
    }
    // Flat pictures: lift points off the plane according to how the curve
    // meets it there, then slide along the curve to the chosen heights.
    if let Some(plane) = plane {
        let sides: Vec<SideClass> = params
            .iter()
            .map(|&t| plane_contact(curve, &plane, t).map(|r| r.side_class).unwrap_or(SideClass::TwoSided))
            .collect();
        for eta in [1e-4, 1e-3, 1e-2] {
            for pattern in 0..64u32 {
                let up = |i: usize| pattern & (1 << i) == 0;
                let allowed = (0..6).all(|i| match sides[i] {
                    SideClass::OneSidedPositive => up(i),
                    SideClass::OneSidedNegative => !up(i),
                    SideClass::TwoSided => true,
                });
                if !allowed {
                    continue;
                }
                let heights: [f64; 6] = std::array::from_fn(|i| if up(i) { eta * diam } else { -eta * diam });
                let lifted = std::array::from_fn(|i| base[i] + plane.normal * heights[i]);
                if s.calls >= CERTIFY_BUDGET {
                    break;
                }
                s.calls += 1;
                let ideal = Hexagon::new(lifted).map(|h| classify_hexagon(&h));
                if !matches!(ideal, Ok(c) if c.kind.is_trefoil()) {
                    continue;
                }
                let slid: Option<Vec<f64>> =
                    (0..6).map(|i| slide_to_height(curve, &plane, params[i], heights[i], 0.02)).collect();
                let Some(slid) = slid else { continue };
                let t: [f64; 6] = std::array::from_fn(|i| slid[i]);
                if let Some(c) = s.classify(&t) {
                    consider(&mut best, t, c);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ef0_11);
    // Nothing yet: random probing around the configuration.
    let mut sigma = 1e-4;
    while best.is_none() && s.calls < CERTIFY_BUDGET / 2 {
        let t: [f64; 6] = std::array::from_fn(|k| params[k] + sigma * rng.gen_range(-1.0..1.0));
        if let Some(c) = s.classify(&t) {
            consider(&mut best, t, c);
        }
        sigma = (sigma * 1.01).min(2e-2);
    }
    let Some((mut t, mut class)) = best else {
        return Err(Unresolved { branch, classifier_calls: s.calls, best: None });
    };
    // Polish the margin by random local moves that keep the knot type.
    let start: f64 = (0..6).map(|k| (t[k] - params[k]).abs()).fold(0.0, f64::max);
    let mut step = (start * 0.25).max(1e-7);
    let mut misses = 0;
    while class.margin < GOOD_MARGIN && s.calls < CERTIFY_BUDGET && step > 1e-12 {
        let trial: [f64; 6] = std::array::from_fn(|k| t[k] + step * rng.gen_range(-1.0..1.0));
        match s.classify(&trial) {
            Some(c) if c.kind == class.kind && c.margin > class.margin => {
                t = trial;
                class = c;
                step *= 1.5;
                misses = 0;
            }
            Some(_) => {
                misses += 1;
                if misses >= 20 {
                    step *= 0.5;
                    misses = 0;
                }
            }
            None => {
                if s.calls >= CERTIFY_BUDGET {
                    break;
                }
                step *= 0.5;
            }
        }
    }
    if class.margin > MIN_MARGIN {
        let t = t.map(|x| x.rem_euclid(1.0));
        Ok(CertifiedTrefoil { params: t, points: s.points(&t), class, branch, classifier_calls: s.calls })
    } else {
        Err(Unresolved { branch, classifier_calls: s.calls, best: Some((t, class)) })
    }
}

/// The R³ picture of `curve` used for certification: R³ curves as given,
/// S³ curves projected from a pole clear of the curve and the points.
pub fn picture(curve: &KnotCurve, sol: &ConfigTuple) -> Box<dyn SpaceCurve<3>> {
    match curve {
        KnotCurve::R3(c) => Box::new(c.clone()),
        KnotCurve::S3(c) => Box::new(ProjectedCurve::new(c.clone(), pole_avoiding(c, &sol.points, 0.2))),
    }
}

pub fn certify_trefoil(curve: &KnotCurve, sol: &ConfigTuple) -> Result<CertifiedTrefoil, Unresolved> {
    certify_params(&*picture(curve, sol), &sol.params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::preset;
    use crate::solve::{find_inscribed_prisms, SearchParams};
    use nalgebra::Vector4;

    fn check(c: &CertifiedTrefoil, curve: &dyn SpaceCurve<3>) {
        assert!(c.class.kind.is_trefoil());
        assert!(c.class.margin > MIN_MARGIN);
        assert!(c.classifier_calls <= CERTIFY_BUDGET);
        for k in 0..6 {
            assert!((curve.point(c.params[k]) - c.points[k]).norm() < 1e-12);
        }
        let h = Hexagon::new(c.points).unwrap();
        assert_eq!(classify_hexagon(&h), c.class);
    }

    #[test]
    fn opposite_volume_gradient() {
        let c = preset("trefoil-r3").unwrap();
        let m = c.r3_model();
        let t = [0.02, 0.2, 0.31, 0.55, 0.7, 0.93];
        for i in 0..3 {
            let (_, g) = opposite_volume(&*m, &t, i);
            for k in 0..6 {
                let h = 1e-6;
                let (mut a, mut b) = (t, t);
                a[k] += h;
                b[k] -= h;
                let fd = (opposite_volume(&*m, &a, i).0 - opposite_volume(&*m, &b, i).0) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-6 * (1.0 + g[k].abs()));
            }
        }
    }

    #[test]
    fn s3_trefoil_symmetric_solution() {
        let c = preset("paper-trefoil-s3").unwrap();
        let sols = find_inscribed_prisms(&*c.s3_model(), 0.0, &SearchParams::default()).unwrap();
        let cert = certify_trefoil(&c, &sols[0]).unwrap();
        assert_eq!(cert.branch, Branch::Spatial);
        check(&cert, &*picture(&c, &sols[0]));
    }

    #[test]
    fn coplanar_picture() {
        // Viewed from a pole on the 2-sphere through the symmetric points,
        // the six points land on a plane.
        let c = preset("paper-trefoil-s3").unwrap();
        let KnotCurve::S3(trig) = &c else { unreachable!() };
        let pic = ProjectedCurve::new(trig.clone(), Vector4::new(0.0, 1.0, 0.0, 0.0));
        let t = [0.0, 1.0 / 6.0, 2.0 / 6.0, 0.5, 4.0 / 6.0, 5.0 / 6.0];
        let cert = certify_params(&pic, &t).unwrap();
        assert_eq!(cert.branch, Branch::Coplanar);
        check(&cert, &pic);
    }

    #[test]
    fn figure_eight_solutions() {
        let c = preset("figure-eight-r3").unwrap();
        let sols = find_inscribed_prisms(&*c.s3_model(), 0.0, &SearchParams::default()).unwrap();
        let certs: Vec<_> = sols.iter().filter_map(|s| certify_trefoil(&c, s).ok()).collect();
        assert!(!certs.is_empty());
        for cert in &certs {
            check(cert, &*c.r3_model());
        }
    }
}
