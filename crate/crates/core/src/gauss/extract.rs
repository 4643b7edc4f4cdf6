use std::collections::HashMap;

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{GaussDiagram, GaussEntry, GaussError};
use crate::curve::SpaceCurve;
use crate::hexknot::view_frame;

pub const MIN_SAMPLES: usize = 1 << 12;
/// Relative tolerance for tangential crossings, near-triple points and
/// touching strands.
const GENERIC_TOL: f64 = 1e-7;

struct Projected<'a, C: ?Sized> {
    curve: &'a C,
    u: Vector3<f64>,
    v: Vector3<f64>,
    d: Vector3<f64>,
}

impl<C: SpaceCurve<3> + ?Sized> Projected<'_, C> {
    fn flat(&self, x: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(self.u.dot(x), self.v.dot(x))
    }

    fn at(&self, t: f64) -> (Vector2<f64>, Vector2<f64>, f64) {
        let tay = self.curve.taylor(t, 1);
        (self.flat(&tay.coeffs[0]), self.flat(&tay.coeffs[1]), self.d.dot(&tay.coeffs[0]))
    }

    /// Newton on `π γ(a) = π γ(b)`.
    fn refine(&self, mut a: f64, mut b: f64) -> Option<(f64, f64)> {
        for _ in 0..30 {
            let (pa, da, _) = self.at(a);
            let (pb, db, _) = self.at(b);
            let f = pa - pb;
            let j = Matrix2::from_columns(&[da, -db]);
            let step = j.lu().solve(&f)?;
            a -= step.x;
            b -= step.y;
            if step.norm() < 1e-15 {
                break;
            }
        }
        let (pa, _, _) = self.at(a);
        let (pb, _, _) = self.at(b);
        ((pa - pb).norm() < 1e-10).then_some((a.rem_euclid(1.0), b.rem_euclid(1.0)))
    }
}

fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Double points of the projection along `direction` (viewer at
/// `+direction`), located on a polyline of `samples` points and then
/// refined on the curve itself.
pub fn gauss_diagram<C: SpaceCurve<3> + ?Sized>(
    curve: &C,
    direction: &Vector3<f64>,
    samples: usize,
) -> Result<GaussDiagram, GaussError> {
    if samples < MIN_SAMPLES {
        return Err(GaussError::TooFewSamples(samples));
    }
    let (u, v, d) = view_frame(direction);
    let proj = Projected { curve, u, v, d };
    let n = samples;
    let pts: Vec<Vector2<f64>> = (0..n).map(|i| proj.flat(&curve.point(i as f64 / n as f64))).collect();
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let scale = (hi - lo).norm().max(f64::MIN_POSITIVE);
    let cell = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (pts[(i + 1) % n] - p).norm())
        .fold(0.0, f64::max)
        .max(scale * 1e-6);
    let key = |p: &Vector2<f64>| (((p.x - lo.x) / cell).floor() as i64, ((p.y - lo.y) / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..n {
        let (a, b) = (key(&pts[i]), key(&pts[(i + 1) % n]));
        for x in a.0.min(b.0)..=a.0.max(b.0) {
            for y in a.1.min(b.1)..=a.1.max(b.1) {
                grid.entry((x, y)).or_default().push(i);
            }
        }
    }
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for bucket in grid.values() {
        for (x, &i) in bucket.iter().enumerate() {
            for &j in &bucket[x + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                if j - i < 2 || (i == 0 && j == n - 1) {
                    continue;
                }
                candidates.push((i, j));
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut raw: Vec<(f64, f64)> = Vec::new();
    for (i, j) in candidates {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let (c, e) = (pts[j], pts[(j + 1) % n]);
        let (r, q) = (b - a, e - c);
        let denom = cross2(&r, &q);
        if denom == 0.0 {
            continue;
        }
        let s = cross2(&(c - a), &q) / denom;
        let t = cross2(&(c - a), &r) / denom;
        // Slightly widened so crossings at polyline vertices are not lost; duplicates merge below.
        if !(-1e-6..=1.0 + 1e-6).contains(&s) || !(-1e-6..=1.0 + 1e-6).contains(&t) {
            continue;
        }
        let ta = (i as f64 + s) / n as f64;
        let tb = (j as f64 + t) / n as f64;
        let Some((ra, rb)) = proj.refine(ta, tb) else {
            return Err(GaussError::NonGeneric(format!("crossing near t = {ta:.6}, {tb:.6} did not refine")));
        };
        if cyclic_gap(ra, ta) > 4.0 / n as f64 || cyclic_gap(rb, tb) > 4.0 / n as f64 {
            return Err(GaussError::NonGeneric(format!("crossing near t = {ta:.6} moved while refining")));
        }
        raw.push((ra.min(rb), ra.max(rb)));
    }
    raw.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut crossings: Vec<(f64, f64)> = Vec::new();
    for c in raw {
        if !crossings.iter().any(|k| cyclic_gap(k.0, c.0) < 1e-9 && cyclic_gap(k.1, c.1) < 1e-9) {
            crossings.push(c);
        }
    }
    let mut entries = Vec::with_capacity(2 * crossings.len());
    let mut places: Vec<Vector2<f64>> = Vec::new();
    for (k, &(a, b)) in crossings.iter().enumerate() {
        let (pa, da, za) = proj.at(a);
        let (_, db, zb) = proj.at(b);
        let angle = cross2(&da, &db).abs() / (da.norm() * db.norm());
        if angle < GENERIC_TOL {
            return Err(GaussError::NonGeneric(format!("tangential crossing at t = {a:.6}")));
        }
        if (za - zb).abs() < GENERIC_TOL * scale {
            return Err(GaussError::NonGeneric(format!("strands touch at t = {a:.6}")));
        }
        if places.iter().any(|p| (p - pa).norm() < GENERIC_TOL * scale) {
            return Err(GaussError::NonGeneric(format!("near-triple point at t = {a:.6}")));
        }
        places.push(pa);
        let a_over = za > zb;
        let (over, under) = if a_over { (da, db) } else { (db, da) };
        let sign = if cross2(&over, &under) > 0.0 { 1 } else { -1 };
        entries.push(GaussEntry { t: a, crossing: k, over: a_over, sign });
        entries.push(GaussEntry { t: b, crossing: k, over: !a_over, sign });
    }
    entries.sort_by(|x, y| x.t.total_cmp(&y.t));
    GaussDiagram::new(entries)
}

#[cfg(test)]
mod tests {
    use super::super::tests::skein;
    use super::super::{a2, a2_of_curve, a2_of_knot};
    use super::*;
    use crate::curve::{preset, TrigCurve};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn generic() -> Vector3<f64> {
        Vector3::new(0.13, -0.21, 0.97).normalize()
    }

    #[test]
    fn ellipse_has_no_crossings() {
        let mut c = TrigCurve::<3>::new(vec![], vec![]);
        c.add_cos(0, 1, 2.0);
        c.add_sin(1, 1, 1.0);
        let g = gauss_diagram(&c, &generic(), 4096).unwrap();
        assert_eq!(g.crossing_count(), 0);
    }

    #[test]
    fn trefoil_from_above() {
        let c = preset("trefoil-r3").unwrap();
        let g = gauss_diagram(&*c.r3_model(), &Vector3::z(), 4096).unwrap();
        assert_eq!(g.crossing_count(), 3);
        let s = g.entries()[0].sign;
        assert!(g.entries().iter().all(|e| e.sign == s));
    }

    /// Oracle: count sign changes of the planar separation on a dense grid
    /// of parameter pairs, without Newton.
    fn dense_crossing_count<C: SpaceCurve<3> + ?Sized>(c: &C, dir: &Vector3<f64>, n: usize) -> usize {
        let (u, v, _) = view_frame(dir);
        let pts: Vec<Vector2<f64>> = (0..n).map(|i| {
            let p = c.point(i as f64 / n as f64);
            Vector2::new(u.dot(&p), v.dot(&p))
        }).collect();
        let mut count = 0;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b, p, q) = (pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]);
                let d1 = cross2(&(b - a), &(p - a)) * cross2(&(b - a), &(q - a));
                let d2 = cross2(&(q - p), &(a - p)) * cross2(&(q - p), &(b - p));
                if d1 < 0.0 && d2 < 0.0 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn figure_eight_generic_direction() {
        let c = preset("figure-eight-r3").unwrap();
        let m = c.r3_model();
        let g = gauss_diagram(&*m, &generic(), 4096).unwrap();
        assert_eq!(g.crossing_count(), dense_crossing_count(&*m, &generic(), 3000));
        assert_eq!(g.writhe(), 0);
        assert_eq!(g.crossing_count(), 4);
    }

    #[test]
    fn preset_values() {
        assert_eq!(a2_of_knot(&preset("trefoil-r3").unwrap()), Ok(1));
        assert_eq!(a2_of_knot(&preset("figure-eight-r3").unwrap()), Ok(-1));
        assert_eq!(a2_of_knot(&preset("great-circle-s3").unwrap()), Ok(0));
        assert_eq!(a2_of_knot(&preset("paper-trefoil-s3").unwrap()), Ok(1));
    }

    #[test]
    fn extracted_diagrams_match_skein_oracle() {
        for name in ["trefoil-r3", "figure-eight-r3", "torus(2,5)-r3", "torus(3,4)-r3"] {
            let c = preset(name).unwrap();
            let m = c.r3_model();
            let g = gauss_diagram(&*m, &generic(), 8192).unwrap();
            assert_eq!(a2(&g), skein::a2_of(&g), "{name}");
            for k in 0..g.entries().len() {
                assert_eq!(a2(&g.rebased(k)), a2(&g), "{name} basepoint {k}");
            }
        }
    }

    #[test]
    fn random_curves_match_skein_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0;
        while checked < 15 {
            let mut c = TrigCurve::<3>::new(vec![], vec![]);
            for i in 0..3 {
                for k in 1..=3 {
                    c.add_cos(i, k, rng.gen_range(-1.0..1.0));
                    c.add_sin(i, k, rng.gen_range(-1.0..1.0));
                }
            }
            let Ok(g) = gauss_diagram(&c, &generic(), 4096) else { continue };
            if g.crossing_count() > 9 {
                continue;
            }
            assert_eq!(a2(&g), skein::a2_of(&g));
            checked += 1;
        }
    }

    #[test]
    fn curve_a2_direction_independent() {
        let c = preset("torus(2,3)-r3").unwrap();
        assert_eq!(a2_of_curve(&*c.r3_model()), Ok(1));
        assert!(matches!(gauss_diagram(&*c.r3_model(), &generic(), 100), Err(GaussError::TooFewSamples(100))));
    }
}
