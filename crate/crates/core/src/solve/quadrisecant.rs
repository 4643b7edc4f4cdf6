use nalgebra::{DMatrix, Matrix6, Vector3, Vector6};
use rayon::prelude::*;
use serde::Serialize;

use super::{cyclic_gap, CertifiedTrefoil};
use crate::curve::SpaceCurve;

/// Largest distance of the four points from their fitted line.
pub const LINE_TOL: f64 = 1e-8;
const MAX_ITER: usize = 60;
const DEDUP: f64 = 1e-6;
/// Points closer than this fraction of the curve diameter count as one.
const DISTINCT: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadrisecantConfig {
    /// `s₁ < s₂ < s₃ < s₄` in `[0, 1)`.
    pub params: [f64; 4],
    pub point: Vector3<f64>,
    pub direction: Vector3<f64>,
    /// Indices into `params` in the order met along `direction`.
    pub order: [usize; 4],
    pub alternating: bool,
    /// Largest distance of the four points from the line.
    pub residual: f64,
}

/// Alternating: the line order `a, b, c, d` is met along the knot as
/// `a, c, b, d`, up to rotation and reversal of the knot cycle.
fn is_alternating(order: &[usize; 4]) -> bool {
    let mut pos = [0usize; 4];
    for (p, &label) in order.iter().enumerate() {
        pos[label] = p;
    }
    let pattern = [0, 2, 1, 3];
    (0..4).any(|r| {
        let fwd = (0..4).all(|k| pos[(k + r) % 4] == pattern[k]);
        let rev = (0..4).all(|k| pos[(r + 4 - k) % 4] == pattern[k]);
        fwd || rev
    })
}

fn frame(u: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if u.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (pick - u * u.dot(&pick)).normalize();
    (e1, u.cross(&e1))
}

fn residual<C: SpaceCurve<3> + ?Sized>(curve: &C, s: &[f64; 4], u: &Vector3<f64>) -> (Vector6<f64>, Matrix6<f64>) {
    let (e1, e2) = frame(u);
    let p: Vec<_> = s.iter().map(|&t| curve.taylor(t, 1)).collect();
    let mut r = Vector6::zeros();
    let mut j = Matrix6::zeros();
    let v0 = p[0].derivative(1);
    for k in 1..4 {
        let d = p[k].coeffs[0] - p[0].coeffs[0];
        let vk = p[k].derivative(1);
        let row = 2 * (k - 1);
        r[row] = e1.dot(&d);
        r[row + 1] = e2.dot(&d);
        j[(row, k)] = e1.dot(&vk);
        j[(row + 1, k)] = e2.dot(&vk);
        j[(row, 0)] = -e1.dot(&v0);
        j[(row + 1, 0)] = -e2.dot(&v0);
        // Tilting u toward e1 (resp. e2) tilts that frame vector back along u.
        j[(row, 4)] = -u.dot(&d);
        j[(row + 1, 5)] = -u.dot(&d);
    }
    (r, j)
}

fn newton<C: SpaceCurve<3> + ?Sized>(curve: &C, seed: [f64; 4], dir: Vector3<f64>, scale: f64) -> Option<([f64; 4], Vector3<f64>)> {
    let mut s = seed;
    let mut u = dir.normalize();
    let (mut r, mut j) = residual(curve, &s, &u);
    for _ in 0..MAX_ITER {
        if r.norm() < 1e-14 * scale {
            break;
        }
        let mut step = j.lu().solve(&(-r))?;
        let big = step.fixed_rows::<4>(0).amax();
        if big > 0.05 {
            step *= 0.05 / big;
        }
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda > 1e-4 {
            let st: [f64; 4] = std::array::from_fn(|k| s[k] + lambda * step[k]);
            let (e1, e2) = frame(&u);
            let ut = (u + (e1 * step[4] + e2 * step[5]) * lambda).normalize();
            let (rt, jt) = residual(curve, &st, &ut);
            if rt.norm() < (1.0 - 1e-4 * lambda) * r.norm() {
                (s, u, r, j) = (st, ut, rt, jt);
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (r.norm() < 1e-10 * scale).then_some((s, u))
}

fn line_fit(pts: &[Vector3<f64>; 4]) -> (Vector3<f64>, Vector3<f64>, f64) {
    let mean = pts.iter().sum::<Vector3<f64>>() / 4.0;
    let m = DMatrix::from_fn(4, 3, |i, j| pts[i][j] - mean[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let k = svd.singular_values.imax();
    let dir = Vector3::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)]).normalize();
    let worst = pts.iter().map(|p| ((p - mean) - dir * dir.dot(&(p - mean))).norm()).fold(0.0, f64::max);
    (mean, dir, worst)
}

/// Lines meeting the curve in four distinct points, seeded from secants
/// through pairs of `grid` sample points that pass near two more samples.
pub fn find_quadrisecants<C: SpaceCurve<3> + ?Sized>(curve: &C, grid: usize) -> Vec<QuadrisecantConfig> {
    let n = grid.max(8);
    let ts: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let pts: Vec<Vector3<f64>> = ts.iter().map(|&t| curve.point(t)).collect();
    let diam = pts.iter().flat_map(|a| pts.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    let step = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).fold(0.0, f64::max);
    let near = |k: usize, a: usize| (k + n - a) % n <= 1 || (a + n - k) % n <= 1;
    let mut seeds: Vec<([f64; 4], Vector3<f64>)> = Vec::new();
    for i in 0..n {
        for j in i + 2..n {
            let u = (pts[j] - pts[i]).normalize();
            let dist = |k: usize| {
                let d = pts[k] - pts[i];
                (d - u * u.dot(&d)).norm()
            };
            let minima: Vec<usize> = (0..n)
                .filter(|&k| !near(k, i) && !near(k, j))
                .filter(|&k| {
                    let dk = dist(k);
                    dk < 2.0 * step && dk <= dist((k + 1) % n) && dk <= dist((k + n - 1) % n)
                })
                .collect();
            for (a, &k1) in minima.iter().enumerate() {
                for &k2 in &minima[a + 1..] {
                    let mut s = [ts[i], ts[j], ts[k1], ts[k2]];
                    s.sort_by(f64::total_cmp);
                    seeds.push((s, u));
                }
            }
        }
    }
    let found: Vec<Option<QuadrisecantConfig>> = seeds
        .par_iter()
        .map(|&(seed, u)| {
            let (s, dir) = newton(curve, seed, u, diam)?;
            let mut params = s.map(|t| t.rem_euclid(1.0));
            params.sort_by(f64::total_cmp);
            let p = params.map(|t| curve.point(t));
            for a in 0..4 {
                for b in a + 1..4 {
                    if (p[a] - p[b]).norm() < DISTINCT * diam {
                        return None;
                    }
                }
            }
            let (point, _, residual) = line_fit(&p);
            if !(residual < LINE_TOL * diam.max(1.0)) {
                return None;
            }
            let mut order = [0, 1, 2, 3];
            order.sort_by(|&a, &b| dir.dot(&p[a]).total_cmp(&dir.dot(&p[b])));
            // Orient the direction so the first point along it has the smallest label.
            let (order, direction) = if order[0] <= order[3] {
                (order, dir)
            } else {
                ([order[3], order[2], order[1], order[0]], -dir)
            };
            Some(QuadrisecantConfig { params, point, direction, order, alternating: is_alternating(&order), residual })
        })
        .collect();
    let mut out: Vec<QuadrisecantConfig> = Vec::new();
    for q in found.into_iter().flatten() {
        if !out.iter().any(|o| (0..4).all(|k| cyclic_gap(o.params[k], q.params[k]) < DEDUP)) {
            out.push(q);
        }
    }
    out.sort_by(|a, b| a.params.partial_cmp(&b.params).expect("finite"));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProximityRow {
    pub trefoil: usize,
    pub quadrisecant: usize,
    /// `maxᵢ minⱼ |γ(tᵢ) − γ(sⱼ)|`.
    pub distance: f64,
}

/// Distances from each certified trefoil's vertices to each alternating
/// quadrisecant's points, both evaluated on `curve`.
pub fn trefoil_quadrisecant_proximity<C: SpaceCurve<3> + ?Sized>(
    curve: &C,
    trefoils: &[CertifiedTrefoil],
    quads: &[QuadrisecantConfig],
) -> Vec<ProximityRow> {
    let mut rows = Vec::new();
    for (ti, tre) in trefoils.iter().enumerate() {
        for (qi, q) in quads.iter().enumerate().filter(|(_, q)| q.alternating) {
            let qp = q.params.map(|s| curve.point(s));
            let distance = tre
                .params
                .iter()
                .map(|&t| {
                    let x = curve.point(t);
                    qp.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            rows.push(ProximityRow { trefoil: ti, quadrisecant: qi, distance });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{preset, TrigCurve};
    use crate::solve::{certify_trefoil, find_inscribed_prisms, SearchParams};

    #[test]
    fn alternating_patterns() {
        assert!(is_alternating(&[0, 2, 1, 3]));
        assert!(is_alternating(&[3, 1, 2, 0]));
        assert!(is_alternating(&[1, 3, 2, 0]));
        assert!(!is_alternating(&[0, 1, 2, 3]));
        assert!(!is_alternating(&[0, 1, 3, 2]));
        let count = permutations().iter().filter(|p| is_alternating(p)).count();
        assert_eq!(count, 8);
    }

    fn permutations() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        if (0..4).all(|x| p.contains(&x)) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn ellipse_has_none() {
        let mut c = TrigCurve::<3>::new(vec![], vec![]);
        c.add_cos(0, 1, 2.0);
        c.add_sin(1, 1, 1.0);
        c.add_cos(2, 1, 0.5);
        assert!(find_quadrisecants(&c, 64).is_empty());
    }

    #[test]
    fn trefoil_has_alternating() {
        let c = preset("trefoil-r3").unwrap();
        let m = c.r3_model();
        let qs = find_quadrisecants(&*m, 96);
        assert!(qs.iter().any(|q| q.alternating));
        for q in &qs {
            assert!(q.residual < LINE_TOL);
            let p = q.params.map(|s| m.point(s));
            for x in p {
                let d = x - q.point;
                assert!((d - q.direction * q.direction.dot(&d)).norm() < LINE_TOL);
            }
        }
    }

    #[test]
    fn proximity_table() {
        let c = preset("trefoil-r3").unwrap();
        let m = c.r3_model();
        let sols = find_inscribed_prisms(&*c.s3_model(), 0.0, &SearchParams::default()).unwrap();
        let trefoils: Vec<_> = sols.iter().filter_map(|s| certify_trefoil(&c, s).ok()).collect();
        let qs = find_quadrisecants(&*m, 96);
        let rows = trefoil_quadrisecant_proximity(&*m, &trefoils, &qs);
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.distance >= 0.0));
        assert!(trefoil_quadrisecant_proximity(&*m, &trefoils, &[]).is_empty());
    }
}
